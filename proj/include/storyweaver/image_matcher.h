#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "storyweaver/article.h"
#include "storyweaver/planner.h"
#include "storyweaver/provider.h"
#include "storyweaver/summarizer.h"

namespace storyweaver {

enum class FeatureProvider { textual_baseline, external };

struct FeatureVector {
  std::vector<double> values;
  FeatureProvider provider = FeatureProvider::textual_baseline;
  bool usable = false;
};

double cosine(const FeatureVector& a, const FeatureVector& b);

// Article-level term index over summaries, captions and image file names.
class Vocabulary {
 public:
  void add(std::string_view text);
  void add_terms(const std::vector<std::string>& terms);
  std::optional<std::size_t> find(const std::string& term) const;
  std::size_t size() const { return index_.size(); }

  static Vocabulary for_article(const Article& article, const SummaryMap& summaries);

 private:
  // Positions follow insertion order; terms are deduplicated.
  std::map<std::string, std::size_t, std::less<>> index_;
};

// L2-normalized term-frequency vector; unusable when no term hits the vocab.
FeatureVector featurize_text(std::string_view text, const Vocabulary& vocab);

// Caption, dataset caption and file-name terms. Unsized images and images
// without any text are unusable.
FeatureVector featurize_image(const ImageAsset& image, const Vocabulary& vocab);

// Re-normalizes an externally computed vector; throws ProviderError when its
// length differs from `dimension`.
FeatureVector from_external(std::vector<double> values, std::size_t dimension);

// Client for the external embedder contract:
// request {"kind": "text"|"image", "payload"} -> reply {"vector": [...]}.
// The first reply fixes the dimension for the session.
class ExternalEmbedder {
 public:
  explicit ExternalEmbedder(std::unique_ptr<JsonTransport> transport)
      : transport_(std::move(transport)) {}

  FeatureVector embed_text(const std::string& text);
  FeatureVector embed_image(const ImageAsset& image);
  std::size_t dimension() const { return dimension_; }

 private:
  FeatureVector embed(const std::string& kind, const std::string& payload);

  std::unique_ptr<JsonTransport> transport_;
  std::size_t dimension_ = 0;
};

using PageKey = std::pair<std::string, int>;  // story id, page ordinal

struct ArticleFeatures {
  std::map<std::string, FeatureVector> images;
  std::map<PageKey, FeatureVector> pages;  // content pages
};

// Baseline (or external, when `embedder` is given) features for every image
// and every content-page snippet.
ArticleFeatures compute_features(const StorySet& stories, const Article& article,
                                 const SummaryMap& summaries,
                                 ExternalEmbedder* embedder = nullptr);

enum class FallbackReason { no_local_image, repetition_avoided, reassigned_from_other_section };

std::string to_string(FallbackReason reason);

struct Assignment {
  std::string story_id;
  int page_ordinal = 0;
  std::string image_id;
  double similarity = 0.0;
  std::optional<FallbackReason> fallback_reason;
};

// Matrix-level form of the assignment problem. Sections are identified by
// pre-order position so proximity is |a - b|.
struct MatchProblem {
  struct Image {
    std::string id;
    std::size_t section = 0;
    FeatureVector features;
  };
  struct Page {
    std::size_t section = 0;
    FeatureVector features;
  };
  std::vector<Image> images;                // usable images only
  std::vector<std::vector<Page>> stories;   // content pages per story
};

struct MatchChoice {
  std::optional<std::size_t> image;  // index into MatchProblem::images
  double similarity = 0.0;
  std::optional<FallbackReason> fallback_reason;
};

struct StoryMatch {
  MatchChoice cover;
  std::vector<MatchChoice> content;
};

// Sequential greedy assignment. A page draws from its own section's images
// when it has any, else from all images (ties prefer images whose section owns
// more than one). Ranking: similarity, then section proximity, then id. The
// best image is skipped for the runner-up when it repeats the previous
// content page of the same story. Covers take the top of their first content
// page's pool.
std::vector<StoryMatch> solve_matching(const MatchProblem& problem);

// Runs solve_matching over a planned StorySet; pages get no assignment when
// the article has no usable image.
std::vector<Assignment> assign_images(const StorySet& stories, const Article& article,
                                      const ArticleFeatures& features,
                                      Diagnostics& warnings);

// Writes image ids onto the pages.
void apply_assignments(StorySet& stories, const std::vector<Assignment>& assignments);

}  // namespace storyweaver
