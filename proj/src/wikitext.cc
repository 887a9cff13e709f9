#include "storyweaver/wikitext.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <set>

#include "storyweaver/text.h"

namespace storyweaver {
namespace {

// Marks an extracted image link inside the cleaned markup: \x01<n>\x02.
constexpr char kMarkOpen = '\x01';
constexpr char kMarkClose = '\x02';

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Index one past the delimiter closing the construct opened at `pos`, honoring
// nesting; npos when unterminated.
std::size_t match_nested(std::string_view s, std::size_t pos, std::string_view open,
                         std::string_view close) {
  int depth = 0;
  std::size_t i = pos;
  while (i < s.size()) {
    if (s.compare(i, open.size(), open) == 0) {
      ++depth;
      i += open.size();
    } else if (s.compare(i, close.size(), close) == 0) {
      --depth;
      i += close.size();
      if (depth == 0) return i;
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

bool at_line_start(std::string_view s, std::size_t pos) {
  while (pos > 0 && (s[pos - 1] == ' ' || s[pos - 1] == '\t')) --pos;
  return pos == 0 || s[pos - 1] == '\n';
}

struct RawImage {
  std::string body;  // inside the [[ ]]
};

struct Preprocessed {
  std::string markup;
  std::vector<RawImage> images;
  std::string description;
  int templates = 0;
  int tables = 0;
  int galleries = 0;
};

Preprocessed preprocess(std::string_view in) {
  Preprocessed out;
  std::string& o = out.markup;
  o.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    std::string_view rest = in.substr(i);
    if (rest.starts_with("<!--")) {
      auto end = in.find("-->", i + 4);
      i = end == std::string_view::npos ? in.size() : end + 3;
    } else if (starts_with_ci(rest, "<ref") && rest.size() > 4 &&
               (rest[4] == '>' || rest[4] == ' ' || rest[4] == '/')) {
      auto gt = in.find('>', i);
      if (gt == std::string_view::npos) {
        i = in.size();
      } else if (in[gt - 1] == '/') {
        i = gt + 1;
      } else {
        auto end = in.find("</ref>", gt);
        i = end == std::string_view::npos ? in.size() : end + 6;
      }
    } else if (starts_with_ci(rest, "<gallery")) {
      auto end = in.find("</gallery>", i);
      i = end == std::string_view::npos ? in.size() : end + 10;
      ++out.galleries;
    } else if (rest.starts_with("{{")) {
      auto end = match_nested(in, i, "{{", "}}");
      if (end == std::string_view::npos) end = in.size();
      std::string_view body = in.substr(i + 2, end - i - 4 > in.size() ? 0 : end - i - 4);
      if (starts_with_ci(body, "short description|")) {
        out.description = text::normalize_space(body.substr(18));
      } else {
        ++out.templates;
      }
      i = end;
    } else if (rest.starts_with("{|") && at_line_start(in, i)) {
      auto end = match_nested(in, i, "{|", "|}");
      i = end == std::string_view::npos ? in.size() : end;
      ++out.tables;
    } else if (rest.starts_with("[[") &&
               (starts_with_ci(rest.substr(2), "file:") ||
                starts_with_ci(rest.substr(2), "image:"))) {
      auto end = match_nested(in, i, "[[", "]]");
      if (end == std::string_view::npos) end = in.size();
      std::size_t body_len = end >= i + 4 ? end - i - 4 : 0;
      out.images.push_back({std::string(in.substr(i + 2, body_len))});
      o.push_back(kMarkOpen);
      o += std::to_string(out.images.size() - 1);
      o.push_back(kMarkClose);
      i = end;
    } else {
      o.push_back(in[i]);
      ++i;
    }
  }
  return out;
}

std::vector<std::string> split_params(std::string_view body) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body.compare(i, 2, "[[") == 0) {
      ++depth;
      cur += "[[";
      ++i;
    } else if (body.compare(i, 2, "]]") == 0 && depth > 0) {
      --depth;
      cur += "]]";
      ++i;
    } else if (body[i] == '|' && depth == 0) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(body[i]);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

bool is_layout_option(const std::string& p) {
  static const std::set<std::string> kOptions = {
      "thumb", "thumbnail", "frame",  "framed",   "frameless", "border",
      "left",  "right",     "center", "centre",   "none",      "baseline",
      "middle", "sub",      "super",  "text-top", "text-bottom", "top",
      "bottom", "upright"};
  std::string l = lower(p);
  if (kOptions.contains(l) || l.starts_with("upright")) return true;
  auto eq = l.find('=');
  if (eq != std::string::npos) {
    static const std::set<std::string> kKeys = {"alt", "link", "page", "class",
                                                "lang", "thumb", "thumbnail"};
    return kKeys.contains(l.substr(0, eq));
  }
  return false;
}

struct ImageSpec {
  std::string name;
  std::string caption;
  int width = 0;
  int height = 0;
};

ImageSpec parse_image(std::string_view body) {
  static const std::regex kSize(R"(^(\d*)(?:x(\d+))?px$)");
  ImageSpec spec;
  auto params = split_params(body);
  std::string target = text::trim(params[0]);
  spec.name = text::trim(target.substr(target.find(':') + 1));
  std::replace(spec.name.begin(), spec.name.end(), ' ', '_');
  for (std::size_t k = 1; k < params.size(); ++k) {
    std::string p = text::trim(params[k]);
    std::smatch m;
    if (std::regex_match(p, m, kSize)) {
      if (m[1].length() > 0) spec.width = std::stoi(m[1]);
      if (m[2].matched) spec.height = std::stoi(m[2]);
    } else if (!is_layout_option(p) && !p.empty()) {
      spec.caption = text::normalize_space(strip_inline_markup(p));
    }
  }
  if (spec.width == 0 || spec.height == 0) spec.width = spec.height = 0;
  return spec;
}

struct Heading {
  int level;
  std::string title;
};

std::optional<Heading> parse_heading(std::string_view line) {
  std::string t = text::trim(line);
  if (t.size() < 2 || t.front() != '=' || t.back() != '=') return std::nullopt;
  std::size_t lead = t.find_first_not_of('=');
  if (lead == std::string::npos) return std::nullopt;
  std::size_t trail = t.size() - 1 - t.find_last_not_of('=');
  std::size_t n = std::min(lead, trail);
  std::string title = text::trim(std::string_view(t).substr(n, t.size() - 2 * n));
  return Heading{static_cast<int>(n) - 1,
                 text::normalize_space(strip_inline_markup(title))};
}

std::string decode_entity(std::string_view name) {
  static const std::map<std::string, std::string, std::less<>> kNamed = {
      {"nbsp", " "},  {"amp", "&"},      {"lt", "<"},       {"gt", ">"},
      {"quot", "\""}, {"apos", "'"},     {"ndash", "\xE2\x80\x93"},
      {"mdash", "\xE2\x80\x94"},         {"minus", "\xE2\x88\x92"}};
  if (auto it = kNamed.find(name); it != kNamed.end()) return it->second;
  if (name.size() > 1 && name[0] == '#') {
    unsigned long cp = 0;
    try {
      cp = (name[1] == 'x' || name[1] == 'X')
               ? std::stoul(std::string(name.substr(2)), nullptr, 16)
               : std::stoul(std::string(name.substr(1)));
    } catch (...) {
      return {};
    }
    std::string out;
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
    return out;
  }
  return "&" + std::string(name) + ";";
}

}  // namespace

std::string strip_inline_markup(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    std::string_view rest = s.substr(i);
    if (rest.starts_with("[[")) {
      auto end = match_nested(s, i, "[[", "]]");
      if (end == std::string_view::npos) {
        out += rest.substr(2);
        break;
      }
      std::string_view body = s.substr(i + 2, end - i - 4);
      if (starts_with_ci(body, "category:") || starts_with_ci(body, ":category:")) {
        // dropped
      } else {
        auto bar = body.rfind('|');
        out += strip_inline_markup(bar == std::string_view::npos ? body
                                                                 : body.substr(bar + 1));
      }
      i = end;
    } else if (rest.starts_with("[http://") || rest.starts_with("[https://") ||
               rest.starts_with("[//")) {
      auto close = s.find(']', i);
      if (close == std::string_view::npos) close = s.size();
      std::string_view body = s.substr(i + 1, close - i - 1);
      auto space = body.find(' ');
      if (space != std::string_view::npos) out += body.substr(space + 1);
      i = close == s.size() ? close : close + 1;
    } else if (rest.starts_with("'''")) {
      i += 3;
    } else if (rest.starts_with("''")) {
      i += 2;
    } else if (rest[0] == '<') {
      auto gt = s.find('>', i);
      if (gt == std::string_view::npos) {
        out.push_back('<');
        ++i;
      } else {
        std::string tag = lower(s.substr(i + 1, gt - i - 1));
        if (tag.starts_with("br")) out.push_back(' ');
        i = gt + 1;
      }
    } else if (rest[0] == '&') {
      auto semi = s.find(';', i);
      if (semi != std::string_view::npos && semi - i <= 10) {
        out += decode_entity(s.substr(i + 1, semi - i - 1));
        i = semi + 1;
      } else {
        out.push_back('&');
        ++i;
      }
    } else {
      out.push_back(rest[0]);
      ++i;
    }
  }
  return out;
}

IngestResult parse_wikitext(std::string_view markup, const WikitextOptions& options) {
  IngestResult result;
  Diagnostics& warnings = result.warnings;
  Preprocessed pre = preprocess(markup);
  if (pre.templates > 0) {
    warnings.push_back({"ingest", "", "skipped " + std::to_string(pre.templates) +
                                          " template(s)"});
  }
  if (pre.tables > 0) {
    warnings.push_back({"ingest", "",
                        "skipped " + std::to_string(pre.tables) + " table(s)"});
  }
  if (pre.galleries > 0) {
    warnings.push_back({"ingest", "", "skipped " + std::to_string(pre.galleries) +
                                          " gallery block(s)"});
  }

  std::string overview;
  std::vector<FlatSection> flat;
  // Owner of each extracted image: -1 for the overview, else a flat position.
  std::vector<int> image_owner(pre.images.size(), -1);
  std::set<int> list_warned;

  std::size_t line_no = 0;
  std::size_t start = 0;
  const std::string& m = pre.markup;
  while (start <= m.size()) {
    auto nl = m.find('\n', start);
    std::string_view line(m.data() + start,
                          (nl == std::string::npos ? m.size() : nl) - start);
    ++line_no;
    start = nl == std::string::npos ? m.size() + 1 : nl + 1;

    int current = static_cast<int>(flat.size()) - 1;
    // Pull image markers out first so skipped lines still register images.
    std::string cleaned;
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == kMarkOpen) {
        auto close = line.find(kMarkClose, k);
        int id = std::stoi(std::string(line.substr(k + 1, close - k - 1)));
        image_owner[static_cast<std::size_t>(id)] = current;
        k = close;
      } else {
        cleaned.push_back(line[k]);
      }
    }

    if (auto h = parse_heading(cleaned)) {
      if (h->level < 1) {
        warnings.push_back({"ingest", "",
                            "ignored level-0 heading '" + h->title + "' at line " +
                                std::to_string(line_no)});
        continue;
      }
      FlatSection f;
      f.level = h->level;
      f.title = h->title;
      f.line = line_no;
      flat.push_back(std::move(f));
      continue;
    }
    std::string t = text::trim(cleaned);
    if (t.empty() || t.starts_with("__") || t.starts_with("----")) continue;
    if (t[0] == '*' || t[0] == '#' || t[0] == ':' || t[0] == ';' || t[0] == '|' ||
        t[0] == '!') {
      if (list_warned.insert(current).second) {
        warnings.push_back({"ingest", "",
                            "skipped list or table lines in " +
                                (current < 0 ? std::string("overview")
                                             : "'" + flat[current].title + "'")});
      }
      continue;
    }
    std::string prose = strip_inline_markup(t);
    std::string& target = current < 0 ? overview : flat[current].text;
    if (!target.empty()) target.push_back(' ');
    target += prose;
  }

  // Drop sections left without text or subsections; their images move to the
  // enclosing section.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < flat.size(); ++k) {
      bool has_children = k + 1 < flat.size() && flat[k + 1].level > flat[k].level;
      if (has_children || !text::trim(flat[k].text).empty()) continue;
      int parent = -1;
      for (int j = static_cast<int>(k) - 1; j >= 0; --j) {
        if (flat[j].level < flat[k].level) {
          parent = j;
          break;
        }
      }
      warnings.push_back({"ingest", "",
                          "dropped empty section '" + flat[k].title + "'"});
      for (auto& owner : image_owner) {
        if (owner == static_cast<int>(k)) {
          owner = parent;
        } else if (owner > static_cast<int>(k)) {
          --owner;
        }
      }
      flat.erase(flat.begin() + static_cast<std::ptrdiff_t>(k));
      changed = true;
      break;
    }
  }

  Article& a = result.article;
  a.title = text::normalize_space(options.title);
  a.description = pre.description;
  a.language = options.language.empty() ? "en" : options.language;
  a.category = options.category;
  a.source_url = options.source_url.empty()
                     ? "https://" + a.language + ".wikipedia.org/wiki/" +
                           text::anchor_fragment(a.title)
                     : options.source_url;
  std::vector<SectionIndex> indices;
  a.root = assemble_tree(overview, flat, warnings, &indices);
  a.root.title = a.title;

  std::set<std::string> seen;
  for (std::size_t k = 0; k < pre.images.size(); ++k) {
    ImageSpec spec = parse_image(pre.images[k].body);
    if (spec.name.empty()) continue;
    if (!seen.insert(spec.name).second) {
      warnings.push_back({"ingest", "", "image '" + spec.name + "' repeated; kept first"});
      continue;
    }
    ImageAsset img;
    img.id = spec.name;
    img.source_url = options.image_url_prefix + spec.name;
    img.caption = spec.caption;
    img.width = spec.width;
    img.height = spec.height;
    img.license_tag = options.image_license;
    int owner = image_owner[k];
    img.section_index = owner < 0 ? SectionIndex{} : indices[static_cast<std::size_t>(owner)];
    a.images.push_back(std::move(img));
  }
  validate_article(a);
  for (const auto& img : a.images) {
    auto* s = const_cast<Section*>(a.find(img.section_index));
    s->image_refs.push_back(img.id);
  }
  return result;
}

}  // namespace storyweaver
