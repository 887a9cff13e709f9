#include "storyweaver/renderer.h"

#include <gtest/gtest.h>

#include <regex>

#include "json.hpp"
#include "storyweaver/html.h"
#include "storyweaver/pipeline.h"
#include "test_util.h"

namespace sw = storyweaver;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

sw::CompiledArticle compile_fixture(const std::string& name) {
  sw::RunConfig cfg;
  return sw::compile_article(
      sw::load_article(swtest::fixture("corpus/" + name + ".json").string(), cfg), cfg);
}

sw::CompiledArticle compile_doc(const std::string& doc) {
  sw::RunConfig cfg;
  return sw::compile_article(sw::parse_article(doc), cfg);
}

// Nine level-1 sections; the first has no text and four children.
std::string four_children_doc() {
  std::string s = R"({"format_version":1,"title":"T","description":"D.","source_url":"https://x/T","overview":"Overview.","sections":[{"level":1,"title":"Parent","text":""})";
  for (int c = 1; c <= 4; ++c) {
    s += R"(,{"level":2,"title":"Child )" + std::to_string(c) + R"(","text":"Child text )" +
         std::to_string(c) + R"(."})";
  }
  for (int i = 2; i <= 9; ++i) {
    s += R"(,{"level":1,"title":"L)" + std::to_string(i) + R"(","text":"Text."})";
  }
  return s + "]}";
}

std::string render(const sw::CompiledArticle& c, const std::string& id) {
  sw::Diagnostics w;
  return sw::render_story(*c.stories.find(id), c, {}, w);
}

bool has_kind(const std::vector<sw::Violation>& v, const std::string& kind) {
  return std::any_of(v.begin(), v.end(), [&](const auto& x) { return x.kind == kind; });
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = swtest::slurp(e.path());
  }
  return out;
}

}  // namespace

TEST(RenderStory, MinimalStoryHasThreePages) {
  auto c = compile_fixture("moss");
  auto doc = render(c, "main");
  auto parsed = sw::html::parse(doc);
  ASSERT_TRUE(parsed.errors.empty());
  EXPECT_EQ(parsed.document.find_all("amp-story-page").size(), 3u);
  EXPECT_TRUE(sw::validate_story_html(doc).empty());
}

TEST(RenderStory, AmpEssentials) {
  auto c = compile_fixture("apple");
  auto doc = render(c, "main");
  auto parsed = sw::html::parse(doc);
  ASSERT_TRUE(parsed.errors.empty());
  const auto* root = parsed.document.find_first("html");
  ASSERT_NE(root, nullptr);
  EXPECT_TRUE(root->has_attr("amp"));
  const auto* story = parsed.document.find_first("amp-story");
  ASSERT_NE(story, nullptr);
  EXPECT_TRUE(story->has_attr("standalone"));
  EXPECT_EQ(story->attr("title"), "Apple");
  EXPECT_FALSE(story->attr("publisher-logo-src").empty());
  EXPECT_FALSE(story->attr("poster-portrait-src").empty());
  EXPECT_NE(doc.find("https://cdn.ampproject.org/v0.js"), std::string::npos);
  EXPECT_NE(doc.find("amp-boilerplate"), std::string::npos);
  for (const auto* img : parsed.document.find_all("amp-img")) {
    EXPECT_FALSE(img->attr("src").empty());
    EXPECT_FALSE(img->attr("width").empty());
    EXPECT_FALSE(img->attr("data-license").empty());
    EXPECT_FALSE(img->attr("alt").empty());
  }
  EXPECT_EQ(parsed.document.find_all("amp-story-page-outlink").size(),
            c.stories.find("main")->pages.size() - 2);
}

TEST(RenderStory, EndPageListsNavTargetsInOrder) {
  auto c = compile_doc(four_children_doc());
  auto parsed = sw::html::parse(render(c, "s-1"));
  ASSERT_TRUE(parsed.errors.empty());
  const auto* nav = parsed.document.find_first("ul");
  ASSERT_NE(nav, nullptr);
  std::vector<std::string> hrefs;
  std::vector<std::string> labels;
  for (const auto* a : nav->find_all("a")) {
    hrefs.push_back(a->attr("href"));
    labels.push_back(a->inner_text());
  }
  EXPECT_EQ(hrefs, (std::vector<std::string>{"s-1-1.html", "s-1-2.html", "s-1-3.html",
                                             "s-1-4.html"}));
  EXPECT_EQ(labels, (std::vector<std::string>{"Child 1", "Child 2", "Child 3", "Child 4"}));
}

TEST(RenderStory, UnresolvedImageRendersTextOnly) {
  auto c = compile_fixture("apple");
  sw::Story story = *c.stories.find("main");
  story.pages[1].image_ref = "missing.jpg";
  sw::Diagnostics w;
  auto doc = sw::render_story(story, c, {}, w);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].message.find("missing.jpg"), std::string::npos);
  EXPECT_EQ(doc.find("missing.jpg"), std::string::npos);
  EXPECT_TRUE(sw::validate_story_html(doc).empty());
}

TEST(ValidateStory, ElevenPagesIsLengthViolation) {
  auto c = compile_fixture("cheetah");
  ASSERT_EQ(c.stories.find("main")->pages.size(), 10u);
  auto doc = render(c, "main");
  EXPECT_TRUE(sw::validate_story_html(doc).empty());
  // Repeat one content page under a fresh id.
  std::smatch m;
  ASSERT_TRUE(std::regex_search(
      doc, m, std::regex(R"(<amp-story-page [^>]*id="page-1">[\s\S]*?</amp-story-page>\s*)")));
  std::string copy = std::regex_replace(m.str(), std::regex(R"(id="page-1")"), R"(id="page-1b")");
  std::string eleven = doc.substr(0, static_cast<std::size_t>(m.position() + m.length())) + copy +
                       doc.substr(static_cast<std::size_t>(m.position() + m.length()));
  EXPECT_EQ(sw::html::parse(eleven).document.find_all("amp-story-page").size(), 11u);
  EXPECT_TRUE(has_kind(sw::validate_story_html(eleven), "length"));
}

TEST(ValidateStory, MissingImageNotFlaggedIsStructureViolation) {
  auto c = compile_fixture("apple");
  auto doc = render(c, "main");
  // Drop the image layer of the first content page without flagging it text-only.
  std::regex layer(
      R"((<amp-story-page [^>]*id="page-1">\s*)<amp-story-grid-layer data-layer="image"[\s\S]*?</amp-story-grid-layer>\s*)");
  std::string tampered = std::regex_replace(doc, layer, "$1");
  ASSERT_NE(tampered, doc);
  EXPECT_TRUE(has_kind(sw::validate_story_html(tampered), "structure"));
}

TEST(ValidateStory, OtherViolations) {
  EXPECT_TRUE(has_kind(sw::validate_story_html("<html><p></html>"), "markup"));
  auto c = compile_fixture("moss");
  auto doc = render(c, "main");
  auto no_outlink = std::regex_replace(
      doc, std::regex(R"(<amp-story-page-outlink[\s\S]*?</amp-story-page-outlink>)"), "");
  EXPECT_FALSE(sw::validate_story_html(no_outlink).empty());
  sw::StoryCheckLimits tight;
  tight.max_snippet_chars = 10;
  EXPECT_TRUE(has_kind(sw::validate_story_html(doc, tight), "snippet"));
}

TEST(RenderBundle, OneStorySet) {
  auto c = compile_fixture("moss");
  swtest::TempDir tmp("bundle");
  sw::render_bundle(c, tmp / "moss");
  auto files = read_tree(tmp / "moss");
  std::vector<std::string> names;
  for (const auto& [k, _] : files) names.push_back(k);
  EXPECT_EQ(names, (std::vector<std::string>{"assets.json", "index.html", "main.html",
                                             "manifest.json"}));
  EXPECT_TRUE(sw::validate_bundle(tmp / "moss").empty());
  // No staging leftovers.
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path())) ++entries;
  EXPECT_EQ(entries, 1);
}

TEST(RenderBundle, DeterministicAndReplacesExisting) {
  swtest::TempDir tmp("det");
  auto a = compile_fixture("lisbon");
  sw::render_bundle(a, tmp / "out");
  auto first = read_tree(tmp / "out");
  swtest::spit(tmp / "out" / "stale.html", "x");
  auto b = compile_fixture("lisbon");
  sw::render_bundle(b, tmp / "out");
  EXPECT_EQ(read_tree(tmp / "out"), first);
  EXPECT_TRUE(sw::validate_bundle(tmp / "out").empty());
}

TEST(RenderBundle, UnwritableTargetIsIoError) {
  auto c = compile_fixture("moss");
  EXPECT_THROW(sw::render_bundle(c, "/proc/definitely/not/here"), sw::IoError);
}

TEST(RenderBundle, OfflineAssetsCopiesLocalFiles) {
  auto c = compile_fixture("apple");
  swtest::TempDir tmp("offline");
  sw::RenderOptions opts;
  opts.offline_assets = true;
  sw::render_bundle(c, tmp / "apple", opts);
  EXPECT_TRUE(sw::validate_bundle(tmp / "apple").empty());
  int copied = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp / "apple" / "assets")) ++copied;
  EXPECT_EQ(copied, 4);
  auto assets = json::parse(swtest::slurp(tmp / "apple" / "assets.json"));
  int bundled = 0;
  for (const auto& img : assets["images"]) bundled += img["bundled_path"].is_string() ? 1 : 0;
  EXPECT_EQ(bundled, 4);
}

TEST(ValidateBundle, DeletedStoryIsLinkViolation) {
  auto c = compile_fixture("lisbon");
  swtest::TempDir tmp("link");
  sw::render_bundle(c, tmp / "b");
  fs::remove(tmp / "b" / "s-2.html");
  auto v = sw::validate_bundle(tmp / "b");
  EXPECT_TRUE(has_kind(v, "link"));
}

TEST(ValidateBundle, DuplicatedSectionRowIsBijectionViolation) {
  auto c = compile_fixture("lisbon");
  swtest::TempDir tmp("bij");
  sw::render_bundle(c, tmp / "b");
  auto m = json::parse(swtest::slurp(tmp / "b" / "manifest.json"));
  m["sections"].push_back(m["sections"][1]);
  swtest::spit(tmp / "b" / "manifest.json", m.dump(2));
  EXPECT_TRUE(has_kind(sw::validate_bundle(tmp / "b"), "bijection"));

  m = json::parse(swtest::slurp(tmp / "b" / "manifest.json"));
  m["sections"].erase(m["sections"].begin() + 2);
  m["sections"].erase(m["sections"].end() - 1);
  swtest::spit(tmp / "b" / "manifest.json", m.dump(2));
  EXPECT_TRUE(has_kind(sw::validate_bundle(tmp / "b"), "bijection"));
}

TEST(ValidateBundle, ManifestProblems) {
  auto c = compile_fixture("moss");
  swtest::TempDir tmp("man");
  sw::render_bundle(c, tmp / "b");
  swtest::spit(tmp / "b" / "manifest.json", "{not json");
  EXPECT_TRUE(has_kind(sw::validate_bundle(tmp / "b"), "manifest"));
  fs::remove(tmp / "b" / "manifest.json");
  EXPECT_TRUE(has_kind(sw::validate_bundle(tmp / "b"), "manifest"));
}

TEST(Manifest, RowsMatchPlan) {
  auto c = compile_fixture("apple");
  auto m = sw::build_manifest(c);
  EXPECT_EQ(m["article"]["title"], "Apple");
  EXPECT_EQ(m["entry"], "main");
  EXPECT_EQ(m["stories"].size(), c.stories.stories.size());
  EXPECT_EQ(m["sections"].size(), sw::text_sections(c.article.root).size());
  std::size_t pages = 0;
  for (const auto& s : c.stories.stories) pages += s.pages.size();
  EXPECT_EQ(m["pages"].size(), pages);
  EXPECT_EQ(m["limits"]["max_pages"], 10);
  auto index = sw::render_index(c);
  EXPECT_NE(index.find("href=\"main.html\""), std::string::npos);
  EXPECT_TRUE(sw::html::parse(index).errors.empty());
}
