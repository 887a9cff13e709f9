#include "storyweaver/html.h"

#include <gtest/gtest.h>

namespace html = storyweaver::html;

TEST(HtmlEscape, TextAndAttributes) {
  EXPECT_EQ(html::escape_text("a < b & c > d \"q\""), "a &lt; b &amp; c &gt; d \"q\"");
  EXPECT_EQ(html::escape_attr("say \"hi\" & <go>"), "say &quot;hi&quot; &amp; &lt;go&gt;");
}

TEST(HtmlSerialize, IndentsAndInlinesText) {
  auto root = html::Node::element("html", {{"lang", "en"}, {"amp", ""}});
  auto& body = root.add(html::Node::element("body"));
  body.add(html::Node::element("h1")).add_text("A & B");
  body.add(html::Node::element("img", {{"src", "x.png"}, {"alt", "\"x\""}}));
  EXPECT_EQ(html::serialize_document(root),
            "<!doctype html>\n"
            "<html amp lang=\"en\">\n"
            "  <body>\n"
            "    <h1>A &amp; B</h1>\n"
            "    <img alt=\"&quot;x&quot;\" src=\"x.png\">\n"
            "  </body>\n"
            "</html>\n");
}

TEST(HtmlSerialize, ScriptBodyIsRaw) {
  auto root = html::Node::element("html");
  root.add(html::Node::element("script", {{"type", "application/json"}}))
      .add_text("{\"a\": \"<b>\"}");
  auto out = html::serialize_document(root);
  EXPECT_NE(out.find("{\"a\": \"<b>\"}"), std::string::npos);
}

TEST(HtmlParse, RoundTripsSerializerOutput) {
  auto root = html::Node::element("html", {{"amp", ""}});
  auto& head = root.add(html::Node::element("head"));
  head.add(html::Node::element("meta", {{"charset", "utf-8"}}));
  head.add(html::Node::element("style", {{"amp-custom", ""}})).add_text("a > b { c: d }");
  auto& body = root.add(html::Node::element("body"));
  body.add(html::Node::element("p", {{"class", "snippet x"}})).add_text("Caf\xC3\xA9 & <tea>");
  auto parsed = html::parse(html::serialize_document(root));
  ASSERT_TRUE(parsed.errors.empty()) << parsed.errors.front();
  const auto* p = parsed.document.find_first("p");
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->inner_text(), "Caf\xC3\xA9 & <tea>");
  EXPECT_TRUE(p->has_class("snippet"));
  EXPECT_FALSE(p->has_class("snip"));
  const auto* style = parsed.document.find_first("style");
  ASSERT_NE(style, nullptr);
  EXPECT_EQ(style->inner_text(), "a > b { c: d }");
  EXPECT_TRUE(parsed.document.find_first("html")->has_attr("amp"));
  EXPECT_EQ(parsed.document.find_all("meta").size(), 1u);
}

TEST(HtmlParse, Entities) {
  auto r = html::parse("<p>&lt;&gt;&amp;&quot;&apos;&nbsp;&#65;&#x42;</p>");
  ASSERT_TRUE(r.errors.empty());
  EXPECT_EQ(r.document.find_first("p")->inner_text(), "<>&\"'\xC2\xA0" "AB");
}

TEST(HtmlParse, ReportsErrors) {
  EXPECT_FALSE(html::parse("<div><p></div>").errors.empty());
  EXPECT_FALSE(html::parse("<div>").errors.empty());
  EXPECT_FALSE(html::parse("</p>").errors.empty());
  EXPECT_FALSE(html::parse("<a href=\"x\" href=\"y\"></a>").errors.empty());
  EXPECT_FALSE(html::parse("<a href=x></a>").errors.empty());
  EXPECT_TRUE(html::parse("<!doctype html><!-- c --><br><img src=\"a\"/>").errors.empty());
}

TEST(HtmlParse, TracksLines) {
  auto r = html::parse("<div>\n<p>x</p>\n</div>");
  ASSERT_TRUE(r.errors.empty());
  EXPECT_EQ(r.document.find_first("p")->line, 2u);
}

TEST(HtmlNode, ElementChildrenSkipText) {
  auto n = html::Node::element("ul");
  n.add_text("  ");
  n.add(html::Node::element("li"));
  EXPECT_EQ(n.element_children().size(), 1u);
  EXPECT_TRUE(html::is_void_element("img"));
  EXPECT_FALSE(html::is_void_element("div"));
}
