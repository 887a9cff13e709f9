#include "storyweaver/html.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>

namespace storyweaver::html {

Node Node::element(std::string tag, std::map<std::string, std::string> attrs) {
  Node n;
  n.tag = std::move(tag);
  n.attrs = std::move(attrs);
  return n;
}

Node Node::text_node(std::string text) {
  Node n;
  n.text = std::move(text);
  return n;
}

Node& Node::add(Node child) {
  children.push_back(std::move(child));
  return children.back();
}

std::string Node::attr(const std::string& name) const {
  auto it = attrs.find(name);
  return it == attrs.end() ? std::string() : it->second;
}

bool Node::has_class(std::string_view cls) const {
  std::string v = attr("class");
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = v.find(' ', i);
    if (j == std::string::npos) j = v.size();
    if (std::string_view(v).substr(i, j - i) == cls) return true;
    i = j + 1;
  }
  return false;
}

std::string Node::inner_text() const {
  if (is_text()) return text;
  std::string out;
  for (const auto& c : children) out += c.inner_text();
  return out;
}

std::vector<const Node*> Node::find_all(std::string_view wanted) const {
  std::vector<const Node*> out;
  std::function<void(const Node&)> walk = [&](const Node& n) {
    for (const auto& c : n.children) {
      if (c.is_text()) continue;
      if (c.tag == wanted) out.push_back(&c);
      walk(c);
    }
  };
  walk(*this);
  return out;
}

const Node* Node::find_first(std::string_view wanted) const {
  auto all = find_all(wanted);
  return all.empty() ? nullptr : all.front();
}

std::vector<const Node*> Node::element_children() const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (!c.is_text()) out.push_back(&c);
  }
  return out;
}

bool is_void_element(std::string_view tag) {
  static constexpr std::array<std::string_view, 8> kVoid = {
      "area", "br", "col", "hr", "img", "input", "link", "meta"};
  return std::find(kVoid.begin(), kVoid.end(), tag) != kVoid.end();
}

namespace {

bool is_raw_text(std::string_view tag) { return tag == "script" || tag == "style"; }

std::string escape(std::string_view s, bool attr) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        out += attr ? "&quot;" : "\"";
        break;
      default: out += c;
    }
  }
  return out;
}

std::string open_tag(const Node& n) {
  std::string out = "<" + n.tag;
  for (const auto& [k, v] : n.attrs) {
    out += " " + k;
    if (!v.empty()) out += "=\"" + escape(v, true) + "\"";
  }
  return out + ">";
}

bool text_only(const Node& n) {
  return std::all_of(n.children.begin(), n.children.end(),
                     [](const Node& c) { return c.is_text(); });
}

void write(const Node& n, int depth, std::string& out) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (n.is_text()) {
    out += pad + escape(n.text, false) + "\n";
    return;
  }
  out += pad + open_tag(n);
  if (is_void_element(n.tag)) {
    out += "\n";
    return;
  }
  if (text_only(n)) {
    for (const auto& c : n.children) {
      out += is_raw_text(n.tag) ? c.text : escape(c.text, false);
    }
    out += "</" + n.tag + ">\n";
    return;
  }
  out += "\n";
  for (const auto& c : n.children) write(c, depth + 1, out);
  out += pad + "</" + n.tag + ">\n";
}

}  // namespace

std::string escape_text(std::string_view s) { return escape(s, false); }
std::string escape_attr(std::string_view s) { return escape(s, true); }

std::string serialize_document(const Node& html_root) {
  std::string out = "<!doctype html>\n";
  write(html_root, 0, out);
  return out;
}

namespace {

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  ParseResult run() {
    ParseResult r;
    std::vector<Node*> stack{&r.document};
    while (pos_ < s_.size()) {
      if (s_[pos_] != '<') {
        std::size_t next = s_.find('<', pos_);
        if (next == std::string_view::npos) next = s_.size();
        std::string t = decode(s_.substr(pos_, next - pos_));
        advance_to(next);
        if (t.find_first_not_of(" \t\r\n") != std::string::npos) {
          Node tn = Node::text_node(std::move(t));
          tn.line = line_;
          stack.back()->add(std::move(tn));
        }
        continue;
      }
      if (starts("<!--")) {
        std::size_t end = s_.find("-->", pos_);
        if (end == std::string_view::npos) {
          error("unterminated comment");
          break;
        }
        advance_to(end + 3);
        continue;
      }
      if (starts("<!")) {
        std::size_t end = s_.find('>', pos_);
        if (end == std::string_view::npos) {
          error("unterminated declaration");
          break;
        }
        advance_to(end + 1);
        continue;
      }
      if (starts("</")) {
        advance_to(pos_ + 2);
        std::string name = read_name();
        skip_space();
        if (!consume('>')) error("malformed closing tag </" + name + ">");
        if (stack.size() <= 1 || stack.back()->tag != name) {
          error("unexpected </" + name + ">" +
                (stack.size() > 1 ? " (open element <" + stack.back()->tag + ">)" : ""));
          continue;
        }
        stack.pop_back();
        continue;
      }
      advance_to(pos_ + 1);
      Node el;
      el.line = line_;
      el.tag = read_name();
      if (el.tag.empty()) {
        error("stray '<'");
        continue;
      }
      bool self_closed = false;
      while (true) {
        skip_space();
        if (pos_ >= s_.size()) {
          error("unterminated tag <" + el.tag + ">");
          return finish(r, stack);
        }
        if (consume('>')) break;
        if (starts("/>")) {
          advance_to(pos_ + 2);
          self_closed = true;
          break;
        }
        std::string name = read_name();
        if (name.empty()) {
          error("bad attribute in <" + el.tag + ">");
          advance_to(pos_ + 1);
          continue;
        }
        std::string value;
        skip_space();
        if (consume('=')) {
          skip_space();
          char q = pos_ < s_.size() ? s_[pos_] : '\0';
          if (q != '"' && q != '\'') {
            error("unquoted attribute value for " + name + " in <" + el.tag + ">");
            std::size_t end = s_.find_first_of(" \t\r\n>", pos_);
            if (end == std::string_view::npos) end = s_.size();
            value = decode(s_.substr(pos_, end - pos_));
            advance_to(end);
          } else {
            std::size_t end = s_.find(q, pos_ + 1);
            if (end == std::string_view::npos) {
              error("unterminated attribute value in <" + el.tag + ">");
              return finish(r, stack);
            }
            value = decode(s_.substr(pos_ + 1, end - pos_ - 1));
            advance_to(end + 1);
          }
        }
        if (el.attrs.contains(name)) error("duplicate attribute " + name);
        el.attrs[name] = std::move(value);
      }
      if (is_void_element(el.tag) || self_closed) {
        stack.back()->add(std::move(el));
        continue;
      }
      if (is_raw_text(el.tag)) {
        std::string close = "</" + el.tag + ">";
        std::size_t end = s_.find(close, pos_);
        if (end == std::string_view::npos) {
          error("unterminated <" + el.tag + ">");
          return finish(r, stack);
        }
        if (end > pos_) el.add_text(std::string(s_.substr(pos_, end - pos_)));
        advance_to(end + close.size());
        stack.back()->add(std::move(el));
        continue;
      }
      Node& added = stack.back()->add(std::move(el));
      stack.push_back(&added);
    }
    return finish(r, stack);
  }

 private:
  ParseResult finish(ParseResult& r, std::vector<Node*>& stack) {
    for (std::size_t i = stack.size(); i > 1; --i) {
      error("unclosed <" + stack[i - 1]->tag + ">");
    }
    r.errors = std::move(errors_);
    return std::move(r);
  }

  bool starts(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

  bool consume(char c) {
    if (pos_ < s_.size() && s_[pos_] == c) {
      advance_to(pos_ + 1);
      return true;
    }
    return false;
  }

  void advance_to(std::size_t p) {
    p = std::min(p, s_.size());
    for (; pos_ < p; ++pos_) {
      if (s_[pos_] == '\n') ++line_;
    }
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      advance_to(pos_ + 1);
    }
  }

  std::string read_name() {
    std::size_t start = pos_;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':') {
        advance_to(pos_ + 1);
      } else {
        break;
      }
    }
    std::string n(s_.substr(start, pos_ - start));
    for (char& c : n) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return n;
  }

  std::string decode(std::string_view raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      std::size_t semi = raw.find(';', i);
      if (semi == std::string_view::npos || semi - i > 10) {
        error("bare '&' in text");
        out += '&';
        continue;
      }
      std::string_view ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (ent == "nbsp") append_utf8(out, 0xA0);
      else if (!ent.empty() && ent[0] == '#') {
        try {
          bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
          unsigned long cp = std::stoul(std::string(ent.substr(hex ? 2 : 1)), nullptr,
                                        hex ? 16 : 10);
          append_utf8(out, cp);
        } catch (const std::exception&) {
          error("bad numeric entity &" + std::string(ent) + ";");
        }
      } else {
        error("unknown entity &" + std::string(ent) + ";");
      }
      i = semi;
    }
    return out;
  }

  void error(const std::string& msg) {
    errors_.push_back("line " + std::to_string(line_) + ": " + msg);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::vector<std::string> errors_;
};

}  // namespace

ParseResult parse(std::string_view markup) { return Parser(markup).run(); }

}  // namespace storyweaver::html
