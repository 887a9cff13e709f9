#include "storyweaver/article.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace sw = storyweaver;

namespace {

const char* kSmall = R"({
  "format_version": 1,
  "title": "Sample",
  "description": "A sample.",
  "source_url": "https://en.wikipedia.org/wiki/Sample",
  "overview": "Intro   text.",
  "sections": [
    {"level": 1, "title": "History", "text": "Old."},
    {"level": 2, "title": "Early", "text": "Very old."},
    {"level": 1, "title": "See also", "text": "Other things."},
    {"level": 1, "title": "Uses", "text": "Eating."}
  ],
  "images": [
    {"id": "a.jpg", "url": "https://x/a.jpg", "width": 10, "height": 20,
     "section_index": "1.1", "license": "CC0"},
    {"id": "b.jpg", "url": "https://x/b.jpg", "width": 10, "height": 20,
     "section_index": "2", "license": "CC0"},
    {"id": "c.jpg", "url": "https://x/c.jpg", "width": 10, "height": 20,
     "section_index": "3", "license": "CC0"}
  ]
})";

std::string with_sections(const std::string& sections, const std::string& images = "[]") {
  return R"({"format_version": 1, "title": "T", "overview": "o.", "sections": )" +
         sections + R"(, "images": )" + images + "}";
}

}  // namespace

TEST(SectionIndex, ParseAndPrint) {
  EXPECT_TRUE(sw::SectionIndex::parse("0").is_root());
  EXPECT_EQ(sw::SectionIndex::parse("0").str(), "0");
  auto i = sw::SectionIndex::parse("1.2");
  EXPECT_EQ(i.path(), (std::vector<int>{1, 2}));
  EXPECT_EQ(i.str(), "1.2");
  EXPECT_EQ(i.parent().str(), "1");
  EXPECT_EQ(i.child(3).str(), "1.2.3");
  EXPECT_TRUE(sw::SectionIndex::parse("1").is_ancestor_of(i));
  EXPECT_FALSE(i.is_ancestor_of(sw::SectionIndex::parse("1")));
  EXPECT_LT(sw::SectionIndex::parse("1.2"), sw::SectionIndex::parse("2"));
}

TEST(ParseArticle, BuildsTreeAndAttachesImages) {
  auto r = sw::parse_article(kSmall);
  const auto& a = r.article;
  EXPECT_EQ(a.title, "Sample");
  EXPECT_EQ(a.root.text, "Intro text.");
  ASSERT_EQ(a.root.children.size(), 3u);
  EXPECT_EQ(a.root.children[0].children[0].index.str(), "1.1");
  EXPECT_EQ(a.root.children[0].children[0].level, 2);
  const auto* early = a.find(sw::SectionIndex::parse("1.1"));
  ASSERT_NE(early, nullptr);
  EXPECT_EQ(early->image_refs, std::vector<std::string>{"a.jpg"});
  EXPECT_EQ(a.content_section_count(), 3u);
  EXPECT_EQ(a.language, "en");
  EXPECT_TRUE(r.warnings.empty());
}

TEST(ParseArticle, MalformedJsonReportsPosition) {
  try {
    sw::parse_article("{\n  \"title\": \"x\",\n  oops\n}");
    FAIL() << "expected ParseError";
  } catch (const sw::ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GE(e.column(), 1u);
  }
}

TEST(ParseArticle, RejectsUnknownField) {
  EXPECT_THROW(sw::parse_article(R"({"format_version":1,"title":"T","overview":"o.","extra":1})"),
               sw::ValidationError);
}

TEST(ParseArticle, RejectsWrongVersion) {
  EXPECT_THROW(sw::parse_article(R"({"format_version":2,"title":"T","overview":"o."})"),
               sw::ValidationError);
}

TEST(ParseArticle, FirstHeadingMustBeLevelOne) {
  EXPECT_THROW(sw::parse_article(with_sections(R"([{"level":2,"title":"Sub","text":"x."}])")),
               sw::ValidationError);
}

TEST(ParseArticle, DeeperJumpIsClampedWithWarning) {
  auto r = sw::parse_article(with_sections(
      R"([{"level":1,"title":"A","text":"a."},{"level":3,"title":"B","text":"b."}])"));
  const auto* b = r.article.find(sw::SectionIndex::parse("1.1"));
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->title, "B");
  EXPECT_EQ(b->level, 2);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].message.find("clamped"), std::string::npos);
}

TEST(ParseArticle, DeclaredIndexMustAgree) {
  EXPECT_THROW(sw::parse_article(with_sections(
                   R"([{"level":1,"title":"A","text":"a.","index":"2"}])")),
               sw::ValidationError);
  EXPECT_NO_THROW(sw::parse_article(with_sections(
      R"([{"level":1,"title":"A","text":"a.","index":"1"}])")));
}

TEST(ParseArticle, EmptyLeafIsInvalid) {
  EXPECT_THROW(sw::parse_article(with_sections(R"([{"level":1,"title":"A","text":""}])")),
               sw::ValidationError);
}

TEST(ParseArticle, ImageInvariants) {
  const std::string sec = R"([{"level":1,"title":"A","text":"a."}])";
  EXPECT_THROW(sw::parse_article(with_sections(
                   sec, R"([{"id":"x","url":"u","section_index":"1","license":""}])")),
               sw::ValidationError);
  EXPECT_THROW(sw::parse_article(with_sections(
                   sec, R"([{"id":"x","url":"u","section_index":"4","license":"L"}])")),
               sw::ValidationError);
  EXPECT_THROW(sw::parse_article(with_sections(
                   sec, R"([{"id":"x","url":"u","section_index":"1","license":"L"},
                            {"id":"x","url":"v","section_index":"1","license":"L"}])")),
               sw::ValidationError);
  auto r = sw::parse_article(with_sections(
      sec, R"([{"id":"x","url":"u","width":5,"section_index":"1","license":"L"}])"));
  EXPECT_FALSE(r.article.images[0].has_resolution());
  EXPECT_EQ(r.article.images[0].width, 0);
  EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(ParseArticle, RoundTripsThroughCanonicalForm) {
  for (const char* name : {"apple", "cheetah", "lighthouse", "lisbon", "moss", "tardigrade"}) {
    auto path = swtest::fixture(std::string("corpus/") + name + ".json");
    auto first = sw::parse_article_file(path).article;
    auto second = sw::parse_article(sw::emit_canonical(first), path.parent_path()).article;
    EXPECT_EQ(first, second) << name;
  }
}

TEST(FilterSections, DropsBlocklistedAndRenumbers) {
  auto a = sw::parse_article(kSmall).article;
  auto f = sw::filter_sections(a);
  ASSERT_EQ(f.root.children.size(), 2u);
  EXPECT_EQ(f.root.children[0].title, "History");
  EXPECT_EQ(f.root.children[1].title, "Uses");
  EXPECT_EQ(f.root.children[1].index.str(), "2");
  ASSERT_EQ(f.images.size(), 2u);
  EXPECT_EQ(f.images[1].id, "c.jpg");
  EXPECT_EQ(f.images[1].section_index.str(), "2");
  EXPECT_EQ(f.root.children[1].image_refs, std::vector<std::string>{"c.jpg"});
  EXPECT_NO_THROW(sw::validate_article(f));
}

TEST(FilterSections, EmptyBlocklistIsIdentity) {
  auto a = sw::parse_article(kSmall).article;
  EXPECT_EQ(sw::filter_sections(a, {}), a);
}

TEST(FilterSections, CaseInsensitiveAndNestedSubtree) {
  auto a = sw::parse_article(with_sections(
               R"([{"level":1,"title":"A","text":"a."},
                   {"level":2,"title":"references","text":"r."},
                   {"level":3,"title":"Deep","text":"d."},
                   {"level":2,"title":"Kept","text":"k."}])"))
               .article;
  auto f = sw::filter_sections(a);
  ASSERT_EQ(f.root.children[0].children.size(), 1u);
  EXPECT_EQ(f.root.children[0].children[0].title, "Kept");
  EXPECT_EQ(f.root.children[0].children[0].index.str(), "1.1");
}

TEST(FilterSections, PrunesInternalSectionLeftEmpty) {
  auto a = sw::parse_article(with_sections(
               R"([{"level":1,"title":"A","text":"a."},
                   {"level":1,"title":"Wrapper","text":""},
                   {"level":2,"title":"Notes","text":"n."}])"))
               .article;
  auto f = sw::filter_sections(a);
  ASSERT_EQ(f.root.children.size(), 1u);
  EXPECT_EQ(f.root.children[0].title, "A");
}

TEST(Traversal, PreorderAndTextSections) {
  auto a = sw::parse_article(kSmall).article;
  auto all = sw::flatten_preorder(a.root);
  ASSERT_EQ(all.size(), 5u);
  EXPECT_EQ(all[1]->index.str(), "1");
  EXPECT_EQ(all[2]->index.str(), "1.1");
  EXPECT_EQ(sw::text_sections(a.root).size(), 5u);
}

TEST(ParseArticleFile, CorpusFixturesCounts) {
  auto apple = sw::filter_sections(
      sw::parse_article_file(swtest::fixture("corpus/apple.json")).article);
  EXPECT_EQ(apple.content_section_count(), 10u);
  EXPECT_EQ(sw::flatten_preorder(apple.root).size(), 28u);
  EXPECT_EQ(apple.images.size(), 15u);
  EXPECT_THROW(sw::parse_article_file("/nonexistent/x.json"), sw::IoError);
}
