#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace storyweaver::html {

// Minimal element tree. Attributes are kept sorted so serialization is
// byte-stable; a present-but-empty value prints as a bare attribute.
struct Node {
  std::string tag;  // empty for a text node
  std::map<std::string, std::string> attrs;
  std::vector<Node> children;
  std::string text;  // text nodes; raw for script/style children
  std::size_t line = 0;  // set by the parser

  static Node element(std::string tag, std::map<std::string, std::string> attrs = {});
  static Node text_node(std::string text);

  bool is_text() const { return tag.empty(); }
  Node& add(Node child);
  Node& add_text(std::string text) { return add(text_node(std::move(text))); }

  bool has_attr(const std::string& name) const { return attrs.contains(name); }
  std::string attr(const std::string& name) const;
  bool has_class(std::string_view cls) const;

  // Concatenated descendant text.
  std::string inner_text() const;

  // Depth-first search over descendants (not this node).
  std::vector<const Node*> find_all(std::string_view tag) const;
  const Node* find_first(std::string_view tag) const;
  std::vector<const Node*> element_children() const;
};

bool is_void_element(std::string_view tag);

// "<!doctype html>\n" plus the indented tree. Elements holding only text stay
// on one line.
std::string serialize_document(const Node& html_root);

std::string escape_text(std::string_view s);
std::string escape_attr(std::string_view s);

struct ParseResult {
  Node document;  // synthetic root; children are top-level nodes
  std::vector<std::string> errors;  // empty when well-formed
};

// Strict parser for the markup this tool emits: every non-void element must be
// closed in order, attribute values quoted, entities limited to the common
// named set and numeric forms.
ParseResult parse(std::string_view markup);

}  // namespace storyweaver::html
