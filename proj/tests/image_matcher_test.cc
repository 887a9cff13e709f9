#include "storyweaver/image_matcher.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "assignment_oracle.h"
#include "storyweaver/planner.h"
#include "test_util.h"

namespace sw = storyweaver;

namespace {

sw::FeatureVector vec(std::vector<double> v) {
  std::size_t n = v.size();
  return sw::from_external(std::move(v), n);
}

sw::MatchProblem::Image image(const std::string& id, std::size_t section,
                              std::vector<double> v) {
  return {id, section, vec(std::move(v))};
}

sw::MatchProblem::Page page(std::size_t section, std::vector<double> v) {
  return {section, vec(std::move(v))};
}

sw::Vocabulary vocab_of(std::initializer_list<const char*> texts) {
  sw::Vocabulary v;
  for (const char* t : texts) v.add(t);
  return v;
}

}  // namespace

TEST(Features, IdenticalTextsHaveCosineOne) {
  auto v = vocab_of({"apple tree orchard"});
  auto a = sw::featurize_text("apple tree orchard", v);
  EXPECT_NEAR(sw::cosine(a, sw::featurize_text("Apple tree, orchard!", v)), 1.0, 1e-12);
}

TEST(Features, DisjointTextsHaveCosineZero) {
  auto v = vocab_of({"apple tree", "river bridge"});
  EXPECT_EQ(sw::cosine(sw::featurize_text("apple tree", v), sw::featurize_text("river bridge", v)),
            0.0);
}

TEST(Features, HalfOverlapHandComputed) {
  auto v = vocab_of({"apple tree orchard blossom", "apple tree river bridge"});
  auto a = sw::featurize_text("apple tree orchard blossom", v);
  auto b = sw::featurize_text("apple tree river bridge", v);
  // two shared unit terms over norms of 2 each
  EXPECT_NEAR(sw::cosine(a, b), 0.5, 1e-9);
  EXPECT_NEAR(sw::cosine(a, b), sw::cosine(b, a), 1e-12);
  // repeated term: (2,1,0) vs (1,0,1) -> 2 / (sqrt5 * sqrt2)
  auto c = sw::featurize_text("apple apple tree", v);
  auto d = sw::featurize_text("apple river", v);
  EXPECT_NEAR(sw::cosine(c, d), 2.0 / (std::sqrt(5.0) * std::sqrt(2.0)), 1e-9);
}

TEST(Features, AllZeroIsUnusable) {
  auto v = vocab_of({"apple"});
  EXPECT_FALSE(sw::featurize_text("the of and", v).usable);
  EXPECT_TRUE(sw::featurize_text("apple", v).usable);
}

TEST(Features, ImageFromFilenameTerms) {
  sw::ImageAsset img;
  img.id = "red_apple_tree.jpg";
  img.source_url = "https://x/File:red_apple_tree.jpg";
  img.width = img.height = 10;
  sw::Vocabulary v;
  v.add("red apple tree green");
  auto f = sw::featurize_image(img, v);
  ASSERT_TRUE(f.usable);
  EXPECT_NEAR(sw::cosine(f, sw::featurize_text("red apple tree", v)), 1.0, 1e-12);
  EXPECT_EQ(f.values[*v.find("green")], 0.0);
}

TEST(Features, CaptionMatchingSummary) {
  sw::ImageAsset img;
  img.id = "x.jpg";
  img.caption = "Blossoms in spring";
  img.width = img.height = 10;
  sw::Vocabulary v;
  v.add("Blossoms in spring");
  v.add("x");
  // filename term "x" rides along: {blossoms, spring, x} vs {blossoms, spring}
  EXPECT_NEAR(sw::cosine(sw::featurize_image(img, v), sw::featurize_text("Blossoms in spring", v)),
              2.0 / (std::sqrt(3.0) * std::sqrt(2.0)), 1e-12);
  img.id = "DSC0042.jpg";  // no vocabulary terms
  EXPECT_NEAR(sw::cosine(sw::featurize_image(img, v), sw::featurize_text("Blossoms in spring", v)),
              1.0, 1e-12);
}

TEST(Features, UnsizedImageUnusable) {
  sw::ImageAsset img;
  img.id = "a.svg";
  img.caption = "apple";
  sw::Vocabulary v;
  v.add("apple");
  EXPECT_FALSE(sw::featurize_image(img, v).usable);
}

TEST(Features, ExternalWrongLengthIsProviderError) {
  EXPECT_THROW(sw::from_external({1.0, 2.0}, 3), sw::ProviderError);
  auto f = sw::from_external({3.0, 4.0}, 2);
  EXPECT_NEAR(f.values[0], 0.6, 1e-12);
  EXPECT_EQ(f.provider, sw::FeatureProvider::external);
}

TEST(SolveMatching, SingletonPoolWins) {
  sw::MatchProblem p;
  p.images = {image("own.jpg", 1, {0, 1}), image("better.jpg", 2, {1, 0})};
  p.stories = {{page(1, {1, 0})}};
  auto r = sw::solve_matching(p);
  EXPECT_EQ(*r[0].content[0].image, 0u);
  EXPECT_FALSE(r[0].content[0].fallback_reason);
}

TEST(SolveMatching, RepetitionAvoided) {
  sw::MatchProblem p;
  // A scores 0.9 and B about 0.7 against both pages.
  double a = 0.9, b = 0.7;
  p.images = {image("A", 1, {a, std::sqrt(1 - a * a), 0}),
              image("B", 1, {b, 0, std::sqrt(1 - b * b)})};
  p.stories = {{page(1, {1, 0, 0}), page(1, {1, 0, 0})}};
  auto r = sw::solve_matching(p);
  EXPECT_EQ(*r[0].content[0].image, 0u);
  EXPECT_NEAR(r[0].content[0].similarity, 0.9, 1e-12);
  EXPECT_EQ(*r[0].content[1].image, 1u);
  EXPECT_EQ(r[0].content[1].fallback_reason, sw::FallbackReason::repetition_avoided);
  EXPECT_NEAR(r[0].content[1].similarity, 0.7, 1e-12);
  EXPECT_EQ(*r[0].cover.image, 0u);
}

TEST(SolveMatching, RepetitionAllowedForSingletonPool) {
  sw::MatchProblem p;
  p.images = {image("A", 1, {1, 0}), image("B", 2, {1, 0})};
  p.stories = {{page(1, {1, 0}), page(1, {1, 0})}};
  auto r = sw::solve_matching(p);
  EXPECT_EQ(*r[0].content[1].image, 0u);
  EXPECT_FALSE(r[0].content[1].fallback_reason);
}

TEST(SolveMatching, GlobalPoolMatchesOracle) {
  sw::MatchProblem p;
  std::vector<oracle::OImage> oimgs;
  std::vector<std::vector<double>> iv = {{1, 2, 0}, {0, 1, 1}, {2, 0, 1}, {1, 1, 1}};
  for (std::size_t i = 0; i < iv.size(); ++i) {
    std::string id = "img" + std::to_string(i);
    p.images.push_back(image(id, i + 1, iv[i]));
    oimgs.push_back({id, static_cast<int>(i + 1), iv[i]});
  }
  std::vector<double> pv = {1, 0, 1};
  p.stories = {{page(7, pv)}};
  auto r = sw::solve_matching(p);
  auto o = oracle::oracle_assignment(oimgs, {{{7, pv}}});
  EXPECT_EQ(static_cast<int>(*r[0].content[0].image), o[0].pages[0].image);
  EXPECT_EQ(*r[0].content[0].image, 2u);  // (2,0,1): 3/sqrt(10) is the largest
  EXPECT_EQ(r[0].content[0].fallback_reason,
            sw::FallbackReason::reassigned_from_other_section);
}

TEST(SolveMatching, GlobalTiePrefersMultiImageSection) {
  sw::MatchProblem p;
  p.images = {image("a", 1, {1, 0}), image("b", 3, {1, 0}), image("c", 3, {0, 1})};
  p.stories = {{page(2, {1, 0})}};
  auto r = sw::solve_matching(p);
  EXPECT_EQ(*r[0].content[0].image, 1u);
  EXPECT_EQ(r[0].content[0].fallback_reason, sw::FallbackReason::no_local_image);
}

TEST(SolveMatching, TiesBreakByProximityThenId) {
  sw::MatchProblem p;
  p.images = {image("z", 1, {1, 0}), image("y", 4, {1, 0}), image("x", 5, {1, 0})};
  p.stories = {{page(3, {1, 0})}};
  EXPECT_EQ(*sw::solve_matching(p)[0].content[0].image, 1u);
  p.images = {image("z", 2, {1, 0}), image("y", 4, {1, 0})};
  EXPECT_EQ(*sw::solve_matching(p)[0].content[0].image, 1u);
}

TEST(SolveMatching, RandomSmallInstancesMatchOracle) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> small(0, 3);
  for (int trial = 0; trial < 30; ++trial) {
    sw::MatchProblem p;
    std::vector<oracle::OImage> oimgs;
    int n = 1 + trial % 6;
    for (int i = 0; i < n; ++i) {
      std::vector<double> v = {double(small(rng)), double(small(rng)), 1.0 + small(rng)};
      p.images.push_back(image("i" + std::to_string(i), static_cast<std::size_t>(small(rng)), v));
      oimgs.push_back({"i" + std::to_string(i), static_cast<int>(p.images.back().section), v});
    }
    std::vector<oracle::OPage> opages;
    std::vector<sw::MatchProblem::Page> pages;
    for (int k = 0; k < 1 + trial % 5; ++k) {
      std::vector<double> v = {double(small(rng)), 1.0 + small(rng), double(small(rng))};
      int sec = small(rng) + 1;
      pages.push_back(page(static_cast<std::size_t>(sec), v));
      opages.push_back({sec, v});
    }
    p.stories = {pages};
    auto r = sw::solve_matching(p);
    auto o = oracle::oracle_assignment(oimgs, {opages});
    ASSERT_EQ(r[0].content.size(), o[0].pages.size());
    for (std::size_t k = 0; k < opages.size(); ++k) {
      EXPECT_EQ(static_cast<int>(*r[0].content[k].image), o[0].pages[k].image)
          << "trial " << trial << " page " << k;
    }
    EXPECT_EQ(static_cast<int>(*r[0].cover.image), o[0].cover.image);
  }
}

TEST(AssignImages, FixturePropertiesHold) {
  auto article = sw::filter_sections(
      sw::parse_article_file(swtest::fixture("corpus/apple.json")).article);
  sw::Diagnostics w;
  auto sums = sw::summarize_article(article, {}, w);
  auto set = sw::plan(article, sums, {});
  auto features = sw::compute_features(set, article, sums, nullptr);
  auto first = sw::assign_images(set, article, features, w);
  auto second = sw::assign_images(set, article, features, w);
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].image_id, second[i].image_id);
  }
  // Unsized svg never chosen; locality holds.
  for (const auto& a : first) {
    const auto* img = article.find_image(a.image_id);
    ASSERT_NE(img, nullptr);
    EXPECT_TRUE(img->has_resolution());
    const sw::Story* story = set.find(a.story_id);
    const auto& pg = story->pages[static_cast<std::size_t>(a.page_ordinal)];
    if (pg.kind != sw::PageKind::content) continue;
    bool owns = false;
    for (const auto& im : article.images) {
      owns = owns || (im.section_index == pg.section_index && im.has_resolution());
    }
    if (owns) EXPECT_EQ(img->section_index, pg.section_index) << a.story_id;
  }
  sw::apply_assignments(set, first);
  // No immediate repetition when the pool allows it.
  for (const auto& story : set.stories) {
    const sw::Page* prev = nullptr;
    for (const auto& pg : story.pages) {
      if (pg.kind != sw::PageKind::content) continue;
      if (prev && prev->image_ref && pg.image_ref && *prev->image_ref == *pg.image_ref) {
        int local = 0;
        int usable = 0;
        for (const auto& im : article.images) {
          if (!im.has_resolution()) continue;
          ++usable;
          local += im.section_index == pg.section_index ? 1 : 0;
        }
        EXPECT_LE(local > 0 ? local : usable, 1) << story.id;
      }
      prev = &pg;
    }
  }
}

TEST(AssignImages, NoUsableImagesWarns) {
  auto article = sw::parse_article_file(swtest::fixture("corpus/tardigrade.json")).article;
  sw::Diagnostics w;
  auto sums = sw::summarize_article(article, {}, w);
  auto set = sw::plan(article, sums, {});
  auto features = sw::compute_features(set, article, sums, nullptr);
  sw::Diagnostics warnings;
  EXPECT_TRUE(sw::assign_images(set, article, features, warnings).empty());
  ASSERT_EQ(warnings.size(), 1u);
}
