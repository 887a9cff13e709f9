#include "storyweaver/image_matcher.h"

#include <cmath>

#include "storyweaver/text.h"

namespace storyweaver {
namespace {

constexpr double kTieEpsilon = 1e-12;

void normalize(FeatureVector& v) {
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  norm = std::sqrt(norm);
  v.usable = norm > 0.0;
  if (v.usable) {
    for (double& x : v.values) x /= norm;
  }
}

std::string image_text(const ImageAsset& image) {
  return image.caption + " " + image.dataset_caption;
}

std::vector<std::string> image_file_terms(const ImageAsset& image) {
  return text::filename_terms(image.source_url.empty() ? image.id : image.source_url);
}

}  // namespace

double cosine(const FeatureVector& a, const FeatureVector& b) {
  if (a.values.size() != b.values.size()) return 0.0;
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

void Vocabulary::add(std::string_view text) { add_terms(text::content_terms(text)); }

void Vocabulary::add_terms(const std::vector<std::string>& terms) {
  for (const auto& t : terms) index_.try_emplace(t, index_.size());
}

std::optional<std::size_t> Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::for_article(const Article& article, const SummaryMap& summaries) {
  Vocabulary v;
  for (const auto& [_, s] : summaries) v.add(s.text());
  for (const auto& img : article.images) {
    v.add(image_text(img));
    v.add_terms(image_file_terms(img));
  }
  return v;
}

FeatureVector featurize_text(std::string_view text, const Vocabulary& vocab) {
  FeatureVector v;
  v.values.assign(vocab.size(), 0.0);
  for (const auto& t : text::content_terms(text)) {
    if (auto k = vocab.find(t)) v.values[*k] += 1.0;
  }
  normalize(v);
  return v;
}

FeatureVector featurize_image(const ImageAsset& image, const Vocabulary& vocab) {
  FeatureVector v;
  v.values.assign(vocab.size(), 0.0);
  if (!image.has_resolution()) return v;
  auto add = [&](const std::vector<std::string>& terms) {
    for (const auto& t : terms) {
      if (auto k = vocab.find(t)) v.values[*k] += 1.0;
    }
  };
  add(text::content_terms(image_text(image)));
  add(image_file_terms(image));
  normalize(v);
  return v;
}

FeatureVector from_external(std::vector<double> values, std::size_t dimension) {
  if (values.size() != dimension) {
    throw ProviderError("embedding has length " + std::to_string(values.size()) +
                        ", expected " + std::to_string(dimension));
  }
  FeatureVector v;
  v.values = std::move(values);
  v.provider = FeatureProvider::external;
  normalize(v);
  return v;
}

FeatureVector ExternalEmbedder::embed(const std::string& kind, const std::string& payload) {
  nlohmann::json reply = transport_->call({{"kind", kind}, {"payload", payload}});
  if (!reply.is_object() || !reply.contains("vector") || !reply["vector"].is_array()) {
    throw ProviderError("embedder reply lacks a vector array");
  }
  std::vector<double> values;
  for (const auto& x : reply["vector"]) {
    if (!x.is_number()) throw ProviderError("embedder vector has a non-number");
    values.push_back(x.get<double>());
  }
  if (dimension_ == 0) dimension_ = values.size();
  return from_external(std::move(values), dimension_);
}

FeatureVector ExternalEmbedder::embed_text(const std::string& text) {
  return embed("text", text);
}

FeatureVector ExternalEmbedder::embed_image(const ImageAsset& image) {
  if (!image.has_resolution()) return {};
  return embed("image", image.source_url);
}

ArticleFeatures compute_features(const StorySet& stories, const Article& article,
                                 const SummaryMap& summaries, ExternalEmbedder* embedder) {
  ArticleFeatures out;
  Vocabulary vocab;
  if (embedder == nullptr) vocab = Vocabulary::for_article(article, summaries);
  for (const auto& img : article.images) {
    out.images[img.id] =
        embedder ? embedder->embed_image(img) : featurize_image(img, vocab);
  }
  for (const auto& story : stories.stories) {
    for (std::size_t k = 0; k < story.pages.size(); ++k) {
      const Page& p = story.pages[k];
      if (p.kind != PageKind::content) continue;
      out.pages[{story.id, static_cast<int>(k)}] =
          embedder ? embedder->embed_text(p.snippet) : featurize_text(p.snippet, vocab);
    }
  }
  return out;
}

std::string to_string(FallbackReason reason) {
  switch (reason) {
    case FallbackReason::no_local_image: return "no_local_image";
    case FallbackReason::repetition_avoided: return "repetition_avoided";
    case FallbackReason::reassigned_from_other_section:
      return "reassigned_from_other_section";
  }
  return "unknown";
}

namespace {

struct Candidate {
  std::size_t image;
  double similarity;
  bool multi_owner;
  std::size_t distance;
};

// Strict "ranks ahead of" over candidates of one pool.
bool ahead(const Candidate& a, const Candidate& b, bool global,
           const MatchProblem& problem) {
  if (std::abs(a.similarity - b.similarity) > kTieEpsilon) {
    return a.similarity > b.similarity;
  }
  if (global && a.multi_owner != b.multi_owner) return a.multi_owner;
  if (a.distance != b.distance) return a.distance < b.distance;
  return problem.images[a.image].id < problem.images[b.image].id;
}

struct Pool {
  std::vector<Candidate> candidates;
  bool global = false;
};

Pool pool_for(const MatchProblem& problem, const MatchProblem::Page& page,
              const std::map<std::size_t, std::size_t>& per_section) {
  Pool pool;
  auto make = [&](std::size_t i) {
    const auto& img = problem.images[i];
    std::size_t d = img.section > page.section ? img.section - page.section
                                               : page.section - img.section;
    return Candidate{i, cosine(page.features, img.features),
                     per_section.at(img.section) > 1, d};
  };
  for (std::size_t i = 0; i < problem.images.size(); ++i) {
    if (problem.images[i].section == page.section) pool.candidates.push_back(make(i));
  }
  if (pool.candidates.empty()) {
    pool.global = true;
    for (std::size_t i = 0; i < problem.images.size(); ++i) {
      pool.candidates.push_back(make(i));
    }
  }
  std::sort(pool.candidates.begin(), pool.candidates.end(),
            [&](const Candidate& a, const Candidate& b) {
              return ahead(a, b, pool.global, problem);
            });
  return pool;
}

std::optional<FallbackReason> pool_reason(const Pool& pool, const Candidate& chosen) {
  if (!pool.global) return std::nullopt;
  return chosen.multi_owner ? FallbackReason::no_local_image
                            : FallbackReason::reassigned_from_other_section;
}

}  // namespace

std::vector<StoryMatch> solve_matching(const MatchProblem& problem) {
  std::map<std::size_t, std::size_t> per_section;
  for (const auto& img : problem.images) ++per_section[img.section];

  std::vector<StoryMatch> out;
  out.reserve(problem.stories.size());
  for (const auto& pages : problem.stories) {
    StoryMatch match;
    std::optional<std::size_t> previous;
    for (std::size_t k = 0; k < pages.size(); ++k) {
      MatchChoice choice;
      if (!problem.images.empty()) {
        Pool pool = pool_for(problem, pages[k], per_section);
        const Candidate* pick = &pool.candidates.front();
        choice.fallback_reason = pool_reason(pool, *pick);
        if (k == 0) {
          match.cover = {pick->image, pick->similarity, choice.fallback_reason};
        }
        if (previous && *previous == pick->image && pool.candidates.size() >= 2) {
          pick = &pool.candidates[1];
          choice.fallback_reason = FallbackReason::repetition_avoided;
        }
        choice.image = pick->image;
        choice.similarity = pick->similarity;
      }
      previous = choice.image;
      match.content.push_back(choice);
    }
    out.push_back(std::move(match));
  }
  return out;
}

std::vector<Assignment> assign_images(const StorySet& stories, const Article& article,
                                      const ArticleFeatures& features,
                                      Diagnostics& warnings) {
  std::map<SectionIndex, std::size_t> position;
  for (const Section* s : flatten_preorder(article.root)) {
    position.emplace(s->index, position.size());
  }

  MatchProblem problem;
  for (const auto& img : article.images) {
    auto it = features.images.find(img.id);
    if (it == features.images.end() || !it->second.usable) continue;
    problem.images.push_back({img.id, position.at(img.section_index), it->second});
  }
  if (problem.images.empty()) {
    warnings.push_back({"match", "", "article has no usable images; text-only layouts"});
    return {};
  }
  for (const auto& story : stories.stories) {
    std::vector<MatchProblem::Page> pages;
    for (std::size_t k = 0; k < story.pages.size(); ++k) {
      const Page& p = story.pages[k];
      if (p.kind != PageKind::content) continue;
      auto it = features.pages.find({story.id, static_cast<int>(k)});
      pages.push_back({position.at(p.section_index),
                       it == features.pages.end() ? FeatureVector{} : it->second});
    }
    problem.stories.push_back(std::move(pages));
  }

  std::vector<StoryMatch> solved = solve_matching(problem);
  std::vector<Assignment> out;
  for (std::size_t si = 0; si < stories.stories.size(); ++si) {
    const Story& story = stories.stories[si];
    const StoryMatch& m = solved[si];
    if (m.cover.image) {
      out.push_back({story.id, 0, problem.images[*m.cover.image].id, m.cover.similarity,
                     m.cover.fallback_reason});
    }
    std::size_t c = 0;
    for (std::size_t k = 0; k < story.pages.size(); ++k) {
      if (story.pages[k].kind != PageKind::content) continue;
      const MatchChoice& choice = m.content[c++];
      if (!choice.image) continue;
      out.push_back({story.id, static_cast<int>(k), problem.images[*choice.image].id,
                     choice.similarity, choice.fallback_reason});
    }
  }
  return out;
}

void apply_assignments(StorySet& stories, const std::vector<Assignment>& assignments) {
  for (const auto& a : assignments) {
    Story* s = stories.find(a.story_id);
    if (s == nullptr || a.page_ordinal < 0 ||
        static_cast<std::size_t>(a.page_ordinal) >= s->pages.size()) {
      continue;
    }
    s->pages[static_cast<std::size_t>(a.page_ordinal)].image_ref = a.image_id;
  }
}

}  // namespace storyweaver
