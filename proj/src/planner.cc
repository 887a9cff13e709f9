#include "storyweaver/planner.h"

#include <algorithm>

#include "storyweaver/text.h"

namespace storyweaver {

void PlannerConfig::validate() const {
  if (max_pages < 4) throw ConfigError("max pages per story must be >= 4");
  if (max_chars_per_page < 60) throw ConfigError("max_chars_per_page must be >= 60");
  if (max_sentences_per_page < 1) {
    throw ConfigError("max_sentences_per_page must be >= 1");
  }
}

std::string to_string(PlanMode mode) {
  return mode == PlanMode::compact ? "compact" : "multi_path";
}

std::string to_string(PageKind kind) {
  switch (kind) {
    case PageKind::cover: return "cover";
    case PageKind::content: return "content";
    case PageKind::end: return "end";
  }
  return "unknown";
}

std::string to_string(StoryKind kind) {
  return kind == StoryKind::main ? "main" : "section";
}

std::string to_string(PageStrategy strategy) {
  switch (strategy) {
    case PageStrategy::compact: return "compact";
    case PageStrategy::split: return "split";
    case PageStrategy::merge: return "merge";
  }
  return "unknown";
}

const Story* StorySet::find(const std::string& id) const {
  for (const auto& s : stories) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

Story* StorySet::find(const std::string& id) {
  return const_cast<Story*>(std::as_const(*this).find(id));
}

PlanMode decide_mode(std::size_t content_sections, const PlannerConfig& cfg) {
  return content_sections + 2 <= static_cast<std::size_t>(cfg.max_pages)
             ? PlanMode::compact
             : PlanMode::multi_path;
}

std::string story_id_for(const SectionIndex& index) {
  if (index.is_root()) return "main";
  std::string id = "s";
  for (int p : index.path()) id += "-" + std::to_string(p);
  return id;
}

namespace {

Page content_page(const Summary& summary, std::vector<std::string> sentences) {
  Page p;
  p.kind = PageKind::content;
  p.section_index = summary.section_index;
  p.origin = summary.origin;
  p.snippet = text::join(sentences, " ");
  p.sentences = std::move(sentences);
  return p;
}

}  // namespace

std::vector<Page> split_pages(const Summary& summary, const PlannerConfig& cfg) {
  const auto max_chars = static_cast<std::size_t>(cfg.max_chars_per_page);
  const auto max_sent = static_cast<std::size_t>(cfg.max_sentences_per_page);
  std::vector<Page> pages;
  std::vector<std::string> cur;
  std::size_t cur_chars = 0;
  auto flush = [&] {
    if (cur.empty()) return;
    Page p = content_page(summary, std::move(cur));
    p.overflow = p.sentences.size() == 1 && cur_chars > max_chars;
    pages.push_back(std::move(p));
    cur.clear();
    cur_chars = 0;
  };
  for (const auto& s : summary.sentences) {
    std::size_t len = text::char_count(s);
    std::size_t with = cur.empty() ? len : cur_chars + 1 + len;
    if (!cur.empty() && (cur.size() >= max_sent || with > max_chars)) {
      flush();
      with = len;
    }
    cur.push_back(s);
    cur_chars = with;
  }
  flush();
  return pages;
}

Page merge_page(const Summary& summary, const PlannerConfig& cfg) {
  const auto max_chars = static_cast<std::size_t>(cfg.max_chars_per_page);
  std::vector<std::string> kept;
  std::size_t chars = 0;
  for (const auto& s : summary.sentences) {
    std::size_t len = text::char_count(s);
    std::size_t with = kept.empty() ? len : chars + 1 + len;
    if (!kept.empty() && with > max_chars) break;
    kept.push_back(s);
    chars = with;
    if (chars > max_chars) break;
  }
  bool truncated = kept.size() < summary.sentences.size();
  Page p = content_page(summary, std::move(kept));
  p.truncated = truncated;
  p.overflow = chars > max_chars;
  return p;
}

std::vector<Page> merge_pages(const std::vector<const Summary*>& children,
                              const PlannerConfig& cfg) {
  std::vector<Page> pages;
  pages.reserve(children.size());
  for (const Summary* s : children) pages.push_back(merge_page(*s, cfg));
  return pages;
}

namespace {

class Planner {
 public:
  Planner(const Article& article, const SummaryMap& summaries, const PlannerConfig& cfg)
      : article_(article), summaries_(summaries), cfg_(cfg) {}

  StorySet run() {
    cfg_.validate();
    for (const Section* s : text_sections(article_.root)) {
      if (!summaries_.contains(s->index)) {
        throw PlanningError("no summary for section " + s->index.str() + " ('" +
                            s->title + "')");
      }
    }
    set_.mode = decide_mode(article_.content_section_count(), cfg_);
    set_.entry = "main";
    if (set_.mode == PlanMode::compact) {
      plan_compact();
    } else {
      plan_multi_path();
    }
    build_section_records();
    return std::move(set_);
  }

 private:
  const Summary& summary_of(const Section& s) const { return summaries_.at(s.index); }

  // First text-bearing section in the subtree, pre-order.
  const Section& representative(const Section& s) const {
    if (s.has_text()) return s;
    for (const auto& c : s.children) {
      const Section& r = representative(c);
      if (r.has_text()) return r;
    }
    return s;
  }

  std::string anchor_for(const Section& s) const {
    if (s.index.is_root()) return article_.source_url;
    return article_.source_url + "#" + text::anchor_fragment(s.title);
  }

  std::vector<Page> own_split_pages(const Section& s) const {
    auto pages = split_pages(summary_of(s), cfg_);
    for (auto& p : pages) {
      p.heading = s.index.is_root() ? article_.title : s.title;
      p.source_anchor = anchor_for(s);
    }
    return pages;
  }

  Page heading_page(const Section& shown_as, const Section& source, bool preview) const {
    Page p = merge_page(summary_of(source), cfg_);
    p.heading = shown_as.title;
    p.source_anchor = anchor_for(source);
    p.preview = preview;
    return p;
  }

  Page description_page(const Section& root) const {
    Page p;
    p.kind = PageKind::content;
    p.heading = article_.title;
    p.snippet = article_.description.empty() ? article_.title : article_.description;
    p.sentences = {p.snippet};
    p.section_index = root.index;
    p.description_page = true;
    p.source_anchor = article_.source_url;
    p.overflow = text::char_count(p.snippet) >
                 static_cast<std::size_t>(cfg_.max_chars_per_page);
    return p;
  }

  // Splits `content` into parts of at most n - 2 pages and appends them as
  // chained Stories. `targets` go on the last part's end page; MERGE pages
  // contribute links to the stories they introduce.
  void emit(const std::string& base_id, StoryKind kind, const Section& section,
            const std::string& title, PageStrategy strategy, std::vector<Page> content,
            const std::vector<std::string>& targets) {
    const auto chunk = static_cast<std::size_t>(cfg_.max_content_pages());
    std::size_t parts = (content.size() + chunk - 1) / chunk;
    for (std::size_t k = 0; k < parts; ++k) {
      Story story;
      story.id = k == 0 ? base_id : base_id + "-p" + std::to_string(k + 1);
      story.kind = kind;
      story.section_index = section.index;
      story.part = static_cast<int>(k) + 1;
      story.title = k == 0 ? title : title + " (Part " + std::to_string(k + 1) + ")";
      story.strategy = strategy;

      Page cover;
      cover.kind = PageKind::cover;
      cover.heading = story.title;
      if (kind == StoryKind::main && k == 0) cover.snippet = article_.description;
      cover.section_index = section.index;
      cover.source_anchor = anchor_for(section);
      story.pages.push_back(std::move(cover));

      std::vector<std::string> nav;
      if (k + 1 < parts) nav.push_back(base_id + "-p" + std::to_string(k + 2));
      auto first = content.begin() + static_cast<std::ptrdiff_t>(k * chunk);
      auto last = content.begin() +
                  static_cast<std::ptrdiff_t>(std::min(content.size(), (k + 1) * chunk));
      for (auto it = first; it != last; ++it) {
        if (it->links_to && std::find(nav.begin(), nav.end(), *it->links_to) == nav.end()) {
          nav.push_back(*it->links_to);
        }
        story.pages.push_back(std::move(*it));
      }
      if (k + 1 == parts) {
        for (const auto& t : targets) {
          if (std::find(nav.begin(), nav.end(), t) == nav.end()) nav.push_back(t);
        }
      }

      Page end;
      end.kind = PageKind::end;
      end.heading = "Continue exploring";
      end.section_index = section.index;
      end.source_anchor = anchor_for(section);
      end.nav_targets = nav;
      story.pages.push_back(std::move(end));
      story.outgoing_links = std::move(nav);
      set_.stories.push_back(std::move(story));
    }
  }

  void plan_compact() {
    const Section& root = article_.root;
    std::vector<Page> content;
    if (root.has_text()) content = own_split_pages(root);
    for (const Section* s : text_sections(root)) {
      if (s->index.is_root()) continue;
      content.push_back(heading_page(*s, *s, false));
    }
    if (content.empty()) content.push_back(description_page(root));
    emit("main", StoryKind::main, root, article_.title, PageStrategy::compact,
         std::move(content), {});
  }

  void plan_multi_path() {
    const Section& root = article_.root;
    std::vector<Page> main_content =
        root.has_text() ? own_split_pages(root) : std::vector<Page>{description_page(root)};
    std::vector<std::string> level1;
    for (const auto& c : root.children) level1.push_back(story_id_for(c.index));
    emit("main", StoryKind::main, root, article_.title, PageStrategy::split,
         std::move(main_content), level1);
    for (std::size_t i = 0; i < root.children.size(); ++i) {
      plan_section(root.children[i], root, i);
    }
  }

  void plan_section(const Section& s, const Section& parent, std::size_t position) {
    std::vector<Page> content;
    if (s.has_text()) content = own_split_pages(s);
    std::vector<std::string> targets;
    PageStrategy strategy = PageStrategy::split;
    if (s.children.empty()) {
      if (position + 1 < parent.children.size()) {
        targets.push_back(story_id_for(parent.children[position + 1].index));
      }
      targets.push_back("main");
    } else if (s.children.size() == 1) {
      const Section& child = s.children.front();
      const Section& source = representative(child);
      auto pages = split_pages(summary_of(source), cfg_);
      for (auto& p : pages) {
        p.heading = child.title;
        p.source_anchor = anchor_for(source);
        p.preview = true;
      }
      content.insert(content.end(), pages.begin(), pages.end());
      targets.push_back(story_id_for(child.index));
    } else {
      strategy = PageStrategy::merge;
      for (const auto& child : s.children) {
        Page p = heading_page(child, representative(child), true);
        p.links_to = story_id_for(child.index);
        content.push_back(std::move(p));
      }
    }
    emit(story_id_for(s.index), StoryKind::section, s, s.title, strategy,
         std::move(content), targets);
    for (std::size_t i = 0; i < s.children.size(); ++i) {
      plan_section(s.children[i], s, i);
    }
  }

  void build_section_records() {
    for (const Section* s : text_sections(article_.root)) {
      SectionRecord rec;
      rec.section_index = s->index;
      rec.origin = summary_of(*s).origin;
      for (const auto& story : set_.stories) {
        for (std::size_t k = 0; k < story.pages.size(); ++k) {
          const Page& p = story.pages[k];
          if (p.kind != PageKind::content || p.preview || p.description_page ||
              p.section_index != s->index) {
            continue;
          }
          if (rec.page_count == 0) {
            rec.story_id = story.id;
            rec.page_ordinal = static_cast<int>(k);
          }
          ++rec.page_count;
          rec.truncated = rec.truncated || p.truncated;
          rec.overflow = rec.overflow || p.overflow;
        }
      }
      set_.sections.push_back(std::move(rec));
    }
  }

  const Article& article_;
  const SummaryMap& summaries_;
  const PlannerConfig& cfg_;
  StorySet set_;
};

}  // namespace

StorySet plan(const Article& article, const SummaryMap& summaries,
              const PlannerConfig& cfg) {
  return Planner(article, summaries, cfg).run();
}

}  // namespace storyweaver
