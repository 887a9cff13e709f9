#include "storyweaver/planner.h"

#include <gtest/gtest.h>

#include <deque>
#include <set>

#include "pagination_oracle.h"
#include "storyweaver/text.h"
#include "test_util.h"

namespace sw = storyweaver;
using swtest::sentence_of_length;
using swtest::summary_of;

namespace {

struct Planned {
  sw::Article article;
  sw::SummaryMap summaries;
  sw::StorySet set;
};

Planned plan_json(const std::string& doc, const sw::PlannerConfig& cfg = {}) {
  Planned p;
  p.article = sw::filter_sections(sw::parse_article(doc).article);
  sw::Diagnostics w;
  p.summaries = sw::summarize_article(p.article, {}, w);
  p.set = sw::plan(p.article, p.summaries, cfg);
  return p;
}

Planned plan_fixture(const std::string& name) {
  return plan_json(swtest::slurp(swtest::fixture("corpus/" + name + ".json")));
}

// Article with `n` level-1 leaf sections and optional children under the first.
std::string article_doc(int level1, int children_of_first, bool first_has_text = false) {
  std::string s = R"({"format_version":1,"title":"T","description":"D.","source_url":"https://x/T","overview":"Overview text.","sections":[)";
  for (int i = 1; i <= level1; ++i) {
    if (i > 1) s += ",";
    bool text = i > 1 || children_of_first == 0 || first_has_text;
    s += R"({"level":1,"title":"L)" + std::to_string(i) + R"(","text":")" +
         (text ? "Text " + std::to_string(i) + "." : "") + R"("})";
    if (i == 1) {
      for (int c = 1; c <= children_of_first; ++c) {
        s += R"(,{"level":2,"title":"C)" + std::to_string(c) + R"(","text":"Child )" +
             std::to_string(c) + R"(."})";
      }
    }
  }
  return s + "]}";
}

std::vector<std::string> ids(const sw::StorySet& set) {
  std::vector<std::string> out;
  for (const auto& s : set.stories) out.push_back(s.id);
  return out;
}

std::set<std::string> reachable(const sw::StorySet& set) {
  std::set<std::string> seen{set.entry};
  std::deque<std::string> queue{set.entry};
  while (!queue.empty()) {
    const sw::Story* s = set.find(queue.front());
    queue.pop_front();
    if (s == nullptr) continue;
    for (const auto& t : s->outgoing_links) {
      if (seen.insert(t).second) queue.push_back(t);
    }
  }
  return seen;
}

const char* kFixtures[] = {"apple", "cheetah", "lighthouse", "lisbon", "moss", "tardigrade"};

}  // namespace

TEST(DecideMode, Boundary) {
  sw::PlannerConfig cfg;
  EXPECT_EQ(sw::decide_mode(0, cfg), sw::PlanMode::compact);
  EXPECT_EQ(sw::decide_mode(8, cfg), sw::PlanMode::compact);
  EXPECT_EQ(sw::decide_mode(9, cfg), sw::PlanMode::multi_path);
  cfg.max_pages = 6;
  EXPECT_EQ(sw::decide_mode(4, cfg), sw::PlanMode::compact);
  EXPECT_EQ(sw::decide_mode(5, cfg), sw::PlanMode::multi_path);
}

TEST(SplitPages, Examples) {
  sw::PlannerConfig cfg;
  auto pages = sw::split_pages(summary_of({sentence_of_length(80), sentence_of_length(80),
                                           sentence_of_length(80)}),
                               cfg);
  ASSERT_EQ(pages.size(), 2u);
  EXPECT_EQ(pages[0].sentences.size(), 2u);
  EXPECT_EQ(sw::text::char_count(pages[0].snippet), 161u);

  pages = sw::split_pages(summary_of({sentence_of_length(120), sentence_of_length(120),
                                      sentence_of_length(120)}),
                          cfg);
  EXPECT_EQ(pages.size(), 3u);

  pages = sw::split_pages(
      summary_of({sentence_of_length(90), sentence_of_length(90), sentence_of_length(90)}),
      cfg);
  ASSERT_EQ(pages.size(), 2u);
  EXPECT_EQ(pages[1].sentences, std::vector<std::string>{sentence_of_length(90)});

  pages = sw::split_pages(summary_of({sentence_of_length(350)}), cfg);
  ASSERT_EQ(pages.size(), 1u);
  EXPECT_TRUE(pages[0].overflow);
  EXPECT_FALSE(pages[0].truncated);
}

TEST(SplitPages, SentenceCapApplies) {
  sw::PlannerConfig cfg;
  auto pages = sw::split_pages(
      summary_of({sentence_of_length(20), sentence_of_length(20), sentence_of_length(20)}), cfg);
  ASSERT_EQ(pages.size(), 2u);
  cfg.max_sentences_per_page = 3;
  EXPECT_EQ(sw::split_pages(summary_of({sentence_of_length(20), sentence_of_length(20),
                                        sentence_of_length(20)}),
                            cfg)
                .size(),
            1u);
}

TEST(MergePage, TruncatesAtSentenceBoundary) {
  sw::PlannerConfig cfg;
  auto p = sw::merge_page(summary_of({sentence_of_length(150), sentence_of_length(100)}), cfg);
  EXPECT_EQ(p.snippet, sentence_of_length(150));
  EXPECT_TRUE(p.truncated);
  EXPECT_FALSE(p.overflow);

  p = sw::merge_page(summary_of({sentence_of_length(99), sentence_of_length(100)}), cfg);
  EXPECT_EQ(sw::text::char_count(p.snippet), 200u);
  EXPECT_FALSE(p.truncated);

  p = sw::merge_page(summary_of({sentence_of_length(250), sentence_of_length(10)}), cfg);
  EXPECT_TRUE(p.overflow);
  EXPECT_TRUE(p.truncated);
  EXPECT_EQ(p.sentences.size(), 1u);
}

TEST(MergePages, OnePagePerChild) {
  auto a = summary_of({"A."}, "1.1");
  auto b = summary_of({"B."}, "1.2");
  auto pages = sw::merge_pages({&a, &b}, {});
  ASSERT_EQ(pages.size(), 2u);
  EXPECT_EQ(pages[1].section_index.str(), "1.2");
}

TEST(Plan, CompactFiveLeaves) {
  auto p = plan_fixture("lighthouse");
  EXPECT_EQ(p.set.mode, sw::PlanMode::compact);
  ASSERT_EQ(p.set.stories.size(), 1u);
  const auto& main = p.set.stories[0];
  EXPECT_EQ(main.id, "main");
  EXPECT_EQ(main.pages.size(), 7u);
  EXPECT_EQ(main.pages.front().kind, sw::PageKind::cover);
  EXPECT_EQ(main.pages.back().kind, sw::PageKind::end);
  EXPECT_TRUE(main.outgoing_links.empty());
}

TEST(Plan, RootOnly) {
  auto p = plan_fixture("moss");
  ASSERT_EQ(p.set.stories.size(), 1u);
  EXPECT_EQ(p.set.stories[0].pages.size(), 3u);
  ASSERT_EQ(p.set.sections.size(), 1u);
  EXPECT_EQ(p.set.sections[0].page_count, 1);
}

TEST(Plan, MultiPathStructure) {
  auto p = plan_json(article_doc(9, 0));
  EXPECT_EQ(p.set.mode, sw::PlanMode::multi_path);
  ASSERT_EQ(p.set.stories.size(), 10u);
  const auto& main = p.set.stories[0];
  EXPECT_EQ(main.kind, sw::StoryKind::main);
  EXPECT_EQ(main.outgoing_links.size(), 9u);
  EXPECT_EQ(main.pages.back().nav_targets, main.outgoing_links);
  // Leaf stories link to the next sibling and back to main.
  const auto* s1 = p.set.find("s-1");
  ASSERT_NE(s1, nullptr);
  EXPECT_EQ(s1->outgoing_links, (std::vector<std::string>{"s-2", "main"}));
  EXPECT_EQ(p.set.find("s-9")->outgoing_links, std::vector<std::string>{"main"});
}

TEST(Plan, MergeWithEightChildrenFits) {
  auto p = plan_json(article_doc(9, 8));
  const auto* s1 = p.set.find("s-1");
  ASSERT_NE(s1, nullptr);
  EXPECT_EQ(s1->strategy, sw::PageStrategy::merge);
  EXPECT_EQ(s1->pages.size(), 10u);
  EXPECT_EQ(p.set.find("s-1-p2"), nullptr);
  for (int c = 1; c <= 8; ++c) {
    EXPECT_NE(p.set.find("s-1-" + std::to_string(c)), nullptr);
  }
}

TEST(Plan, MergeWithNineChildrenChains) {
  auto p = plan_json(article_doc(9, 9));
  const auto* s1 = p.set.find("s-1");
  const auto* s1p2 = p.set.find("s-1-p2");
  ASSERT_NE(s1, nullptr);
  ASSERT_NE(s1p2, nullptr);
  EXPECT_EQ(s1->pages.size(), 10u);
  EXPECT_EQ(s1p2->pages.size(), 3u);
  EXPECT_EQ(s1p2->part, 2);
  EXPECT_EQ(s1p2->title, "L1 (Part 2)");
  EXPECT_EQ(s1->outgoing_links.front(), "s-1-p2");
  EXPECT_EQ(s1p2->outgoing_links, std::vector<std::string>{"s-1-9"});
}

TEST(Plan, MissingSummaryIsPlanningError) {
  auto a = sw::parse_article(article_doc(2, 0)).article;
  sw::SummaryMap none;
  EXPECT_THROW(sw::plan(a, none, {}), sw::PlanningError);
}

TEST(Plan, InvalidConfig) {
  auto a = sw::parse_article(article_doc(2, 0)).article;
  sw::Diagnostics w;
  auto sums = sw::summarize_article(a, {}, w);
  sw::PlannerConfig cfg;
  cfg.max_pages = 3;
  EXPECT_THROW(sw::plan(a, sums, cfg), sw::ConfigError);
}

TEST(Plan, LawsHoldOnFixtures) {
  for (const char* name : kFixtures) {
    SCOPED_TRACE(name);
    auto p = plan_fixture(name);
    std::set<std::string> all;
    for (const auto& s : p.set.stories) all.insert(s.id);
    EXPECT_EQ(reachable(p.set), all);
    for (const auto& s : p.set.stories) {
      EXPECT_GE(s.pages.size(), 3u) << s.id;
      EXPECT_LE(s.pages.size(), 10u) << s.id;
      for (const auto& page : s.pages) {
        if (page.kind != sw::PageKind::content) continue;
        if (!page.overflow) EXPECT_LE(sw::text::char_count(page.snippet), 200u) << s.id;
        if (page.description_page) continue;
        // Snippets are whole sentences of a summary.
        const auto& sum = p.summaries.at(page.section_index);
        for (const auto& sent : page.sentences) {
          EXPECT_NE(std::find(sum.sentences.begin(), sum.sentences.end(), sent),
                    sum.sentences.end());
        }
        EXPECT_EQ(page.snippet, sw::text::join(page.sentences, " "));
      }
    }
    // One record per text section, each with a presenting page.
    auto texts = sw::text_sections(p.article.root);
    ASSERT_EQ(p.set.sections.size(), texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) {
      EXPECT_EQ(p.set.sections[i].section_index, texts[i]->index);
      EXPECT_GE(p.set.sections[i].page_count, 1);
      EXPECT_NE(p.set.find(p.set.sections[i].story_id), nullptr);
    }
  }
}

TEST(Plan, SplitStoryPagesMatchOracle) {
  auto p = plan_fixture("cheetah");
  const auto* main = p.set.find("main");
  ASSERT_NE(main, nullptr);
  EXPECT_EQ(main->pages.size(), 10u);
  const auto& overview = p.summaries.at(sw::SectionIndex{});
  auto expected = oracle::oracle_pagination(overview.sentences, {});
  std::size_t k = 1;
  for (const auto& page_sentences : expected) {
    ASSERT_LT(k, main->pages.size());
    std::vector<std::string> want;
    for (int i : page_sentences) want.push_back(overview.sentences[static_cast<std::size_t>(i)]);
    EXPECT_EQ(main->pages[k].sentences, want);
    ++k;
  }
}

TEST(Plan, FixtureStoryCounts) {
  EXPECT_EQ(plan_fixture("apple").set.stories.size(), 28u);
  auto lisbon = plan_fixture("lisbon");
  EXPECT_EQ(lisbon.set.stories.size(), 22u);
  EXPECT_NE(lisbon.set.find("s-5-p2"), nullptr);
  EXPECT_EQ(plan_fixture("lisbon").set.mode, sw::PlanMode::multi_path);
  EXPECT_EQ(ids(plan_fixture("tardigrade").set), std::vector<std::string>{"main"});
}
