#include "storyweaver/article.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "storyweaver/text.h"

namespace storyweaver {

using nlohmann::json;

SectionIndex SectionIndex::parse(std::string_view s) {
  if (s == "0") return SectionIndex{};
  std::vector<int> path;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto dot = s.find('.', pos);
    auto part = s.substr(pos, dot == std::string_view::npos ? s.npos : dot - pos);
    int value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() ||
        value < 1) {
      throw ValidationError("invalid section index '" + std::string(s) + "'");
    }
    path.push_back(value);
    if (dot == std::string_view::npos) break;
    pos = dot + 1;
  }
  return SectionIndex(std::move(path));
}

SectionIndex SectionIndex::child(int ordinal) const {
  auto p = path_;
  p.push_back(ordinal);
  return SectionIndex(std::move(p));
}

SectionIndex SectionIndex::parent() const {
  if (path_.empty()) return {};
  return SectionIndex(std::vector<int>(path_.begin(), path_.end() - 1));
}

bool SectionIndex::is_ancestor_of(const SectionIndex& other) const {
  return other.path_.size() > path_.size() &&
         std::equal(path_.begin(), path_.end(), other.path_.begin());
}

std::string SectionIndex::str() const {
  if (path_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < path_.size(); ++i) {
    if (i > 0) out.push_back('.');
    out += std::to_string(path_[i]);
  }
  return out;
}

bool Section::has_text() const { return !text.empty(); }

const Section* Article::find(const SectionIndex& index) const {
  const Section* cur = &root;
  for (int ordinal : index.path()) {
    if (ordinal < 1 || static_cast<std::size_t>(ordinal) > cur->children.size()) {
      return nullptr;
    }
    cur = &cur->children[static_cast<std::size_t>(ordinal - 1)];
  }
  return cur;
}

const ImageAsset* Article::find_image(std::string_view id) const {
  for (const auto& img : images) {
    if (img.id == id) return &img;
  }
  return nullptr;
}

void for_each_preorder(const Section& root,
                       const std::function<void(const Section&)>& fn) {
  fn(root);
  for (const auto& c : root.children) for_each_preorder(c, fn);
}

std::vector<const Section*> flatten_preorder(const Section& root) {
  std::vector<const Section*> out;
  for_each_preorder(root, [&](const Section& s) { out.push_back(&s); });
  return out;
}

std::vector<const Section*> text_sections(const Section& root) {
  std::vector<const Section*> out;
  for_each_preorder(root, [&](const Section& s) {
    if (s.has_text()) out.push_back(&s);
  });
  return out;
}

Section assemble_tree(std::string overview, const std::vector<FlatSection>& flat,
                      Diagnostics& warnings,
                      std::vector<SectionIndex>* flat_indices) {
  Section root;
  root.level = 0;
  root.text = text::normalize_space(overview);

  // Stack of open sections; stack[k] has level k.
  std::vector<Section*> stack{&root};
  std::set<std::string> declared;
  for (const auto& f : flat) {
    int level = f.level;
    if (level < 1) {
      throw ValidationError("heading '" + f.title + "' at line " +
                            std::to_string(f.line) + " has level " +
                            std::to_string(level) + "; sections start at level 1");
    }
    int parent_level = static_cast<int>(stack.size()) - 1;
    if (level > parent_level + 1) {
      if (parent_level == 0) {
        throw ValidationError("level jump: heading '" + f.title + "' at line " +
                              std::to_string(f.line) + " is level " +
                              std::to_string(level) +
                              " but no level-1 section precedes it");
      }
      warnings.push_back({"ingest", "",
                          "heading '" + f.title + "' jumps from level " +
                              std::to_string(parent_level) + " to " +
                              std::to_string(level) + "; clamped to " +
                              std::to_string(parent_level + 1)});
      level = parent_level + 1;
    }
    stack.resize(static_cast<std::size_t>(level));
    Section* parent = stack.back();
    Section s;
    s.title = text::normalize_space(f.title);
    s.text = text::normalize_space(f.text);
    s.level = level;
    s.index = parent->index.child(static_cast<int>(parent->children.size()) + 1);
    if (f.declared_index) {
      if (!declared.insert(*f.declared_index).second) {
        throw ValidationError("duplicate section index " + *f.declared_index);
      }
      if (SectionIndex::parse(*f.declared_index) != s.index) {
        throw ValidationError("section '" + s.title + "' declares index " +
                              *f.declared_index + " but its position gives " +
                              s.index.str());
      }
    }
    if (flat_indices != nullptr) flat_indices->push_back(s.index);
    parent->children.push_back(std::move(s));
    stack.push_back(&parent->children.back());
  }
  return root;
}

namespace {

void validate_section(const Section& s, const SectionIndex& expected) {
  if (s.index != expected) {
    throw ValidationError("section '" + s.title + "' has index " + s.index.str() +
                          ", expected " + expected.str());
  }
  if (s.level != static_cast<int>(expected.depth())) {
    throw ValidationError("section " + s.index.str() + " has level " +
                          std::to_string(s.level) + ", expected " +
                          std::to_string(expected.depth()));
  }
  if (!s.index.is_root() && !s.has_text() && s.children.empty()) {
    throw ValidationError("section " + s.index.str() + " ('" + s.title +
                          "') has neither text nor subsections");
  }
  for (std::size_t i = 0; i < s.children.size(); ++i) {
    validate_section(s.children[i], expected.child(static_cast<int>(i) + 1));
  }
}

std::size_t line_of(std::string_view doc, std::size_t byte, std::size_t& column) {
  std::size_t line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < byte && i < doc.size(); ++i) {
    if (doc[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  }
  column = byte >= line_start ? byte - line_start + 1 : 1;
  return line;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(where + ": missing required field '" + key + "'");
  }
  return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& where,
                       bool required = true) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw ValidationError(where + ": missing required field '" + key + "'");
    return {};
  }
  if (!it->is_string()) {
    throw ValidationError(where + "." + key + ": expected a string");
  }
  return it->get<std::string>();
}

int get_int(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) {
    throw ValidationError(where + "." + key + ": expected an integer");
  }
  return v.get<int>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return key == k; })) {
      throw ValidationError(where + ": unknown field '" + key + "'");
    }
  }
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void attach_image_refs(Article& a) {
  std::function<void(Section&)> clear = [&](Section& s) {
    s.image_refs.clear();
    for (auto& c : s.children) clear(c);
  };
  clear(a.root);
  for (const auto& img : a.images) {
    auto* s = const_cast<Section*>(a.find(img.section_index));
    if (s != nullptr) s->image_refs.push_back(img.id);
  }
}

}  // namespace

void validate_article(const Article& article) {
  if (article.title.empty()) throw ValidationError("article title is empty");
  validate_section(article.root, SectionIndex{});
  if (article.root.children.empty() && !article.root.has_text()) {
    throw ValidationError("article has neither overview text nor sections");
  }
  std::set<std::string> ids;
  for (const auto& img : article.images) {
    if (img.id.empty()) throw ValidationError("image with empty id");
    if (!ids.insert(img.id).second) {
      throw ValidationError("duplicate image id '" + img.id + "'");
    }
    if (img.width < 0 || img.height < 0) {
      throw ValidationError("image '" + img.id + "' has negative dimensions");
    }
    if (img.license_tag.empty()) {
      throw ValidationError("image '" + img.id + "' has no license tag");
    }
    if (article.find(img.section_index) == nullptr) {
      throw ValidationError("image '" + img.id + "' refers to missing section " +
                            img.section_index.str());
    }
  }
}

IngestResult parse_article(std::string_view document,
                           const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    std::size_t column = 0;
    std::size_t line = line_of(document, e.byte > 0 ? e.byte - 1 : 0, column);
    throw ParseError("malformed article document: " + std::string(e.what()), line,
                     column);
  }
  if (!doc.is_object()) throw ParseError("article document must be an object", 1, 1);
  reject_unknown(doc,
                 {"format_version", "title", "description", "language", "source_url",
                  "category", "overview", "sections", "images"},
                 "article");
  if (get_int(doc, "format_version", "article") != 1) {
    throw ValidationError("unsupported format_version (expected 1)");
  }

  IngestResult result;
  Article& a = result.article;
  a.title = text::normalize_space(get_string(doc, "title", "article"));
  a.description = text::normalize_space(get_string(doc, "description", "article", false));
  a.language = get_string(doc, "language", "article", false);
  if (a.language.empty()) a.language = "en";
  a.source_url = get_string(doc, "source_url", "article", false);
  a.category = get_string(doc, "category", "article", false);

  std::vector<FlatSection> flat;
  if (auto it = doc.find("sections"); it != doc.end()) {
    if (!it->is_array()) throw ValidationError("article.sections: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& s = (*it)[i];
      std::string where = "sections[" + std::to_string(i) + "]";
      if (!s.is_object()) throw ValidationError(where + ": expected an object");
      reject_unknown(s, {"level", "title", "text", "index"}, where);
      FlatSection f;
      f.level = get_int(s, "level", where);
      f.title = get_string(s, "title", where);
      f.text = get_string(s, "text", where, false);
      f.line = i + 1;
      if (s.contains("index")) f.declared_index = get_string(s, "index", where);
      flat.push_back(std::move(f));
    }
  }
  a.root = assemble_tree(get_string(doc, "overview", "article", false), flat,
                         result.warnings);
  a.root.title = a.title;

  if (auto it = doc.find("images"); it != doc.end()) {
    if (!it->is_array()) throw ValidationError("article.images: expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& j = (*it)[i];
      std::string where = "images[" + std::to_string(i) + "]";
      if (!j.is_object()) throw ValidationError(where + ": expected an object");
      reject_unknown(j,
                     {"id", "url", "caption", "dataset_caption", "width", "height",
                      "section_index", "license", "file"},
                     where);
      ImageAsset img;
      img.id = get_string(j, "id", where);
      img.source_url = get_string(j, "url", where);
      img.caption = text::normalize_space(get_string(j, "caption", where, false));
      img.dataset_caption =
          text::normalize_space(get_string(j, "dataset_caption", where, false));
      img.width = j.contains("width") ? get_int(j, "width", where) : 0;
      img.height = j.contains("height") ? get_int(j, "height", where) : 0;
      if (img.width == 0 || img.height == 0) {
        if (img.width > 0 || img.height > 0) {
          result.warnings.push_back({"ingest", "",
                                     "image '" + img.id +
                                         "' has partial resolution; treated as unsized"});
        }
        img.width = img.height = 0;
      }
      img.section_index = SectionIndex::parse(get_string(j, "section_index", where));
      img.license_tag = get_string(j, "license", where);
      std::string file = get_string(j, "file", where, false);
      if (!file.empty()) {
        std::filesystem::path p(file);
        img.local_file = (p.is_relative() && !base_dir.empty())
                             ? (base_dir / p).lexically_normal().string()
                             : p.string();
      }
      a.images.push_back(std::move(img));
    }
  }
  validate_article(a);
  attach_image_refs(a);
  return result;
}

IngestResult parse_article_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read article file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_article(buf.str(), path.parent_path());
}

std::string emit_canonical(const Article& article) {
  json doc;
  doc["format_version"] = 1;
  doc["title"] = article.title;
  doc["description"] = article.description;
  doc["language"] = article.language;
  doc["source_url"] = article.source_url;
  if (!article.category.empty()) doc["category"] = article.category;
  doc["overview"] = article.root.text;
  json sections = json::array();
  for (const Section* s : flatten_preorder(article.root)) {
    if (s->index.is_root()) continue;
    sections.push_back({{"level", s->level},
                        {"title", s->title},
                        {"text", s->text},
                        {"index", s->index.str()}});
  }
  doc["sections"] = std::move(sections);
  json images = json::array();
  for (const auto& img : article.images) {
    json j{{"id", img.id},
           {"url", img.source_url},
           {"caption", img.caption},
           {"width", img.width},
           {"height", img.height},
           {"section_index", img.section_index.str()},
           {"license", img.license_tag}};
    if (!img.dataset_caption.empty()) j["dataset_caption"] = img.dataset_caption;
    if (!img.local_file.empty()) j["file"] = img.local_file;
    images.push_back(std::move(j));
  }
  doc["images"] = std::move(images);
  return doc.dump(2) + "\n";
}

const std::vector<std::string>& default_blocklist() {
  static const std::vector<std::string> kBlocklist = {
      "See also", "References", "External links",
      "Notes",    "Further reading", "Bibliography"};
  return kBlocklist;
}

namespace {

// Copies `src` into `dst` minus blocked subtrees; records old -> new indices.
// Returns false when the rebuilt section must be pruned.
bool rebuild(const Section& src, const SectionIndex& new_index,
             const std::set<std::string>& blocked,
             std::map<SectionIndex, SectionIndex>& remap, Section& dst) {
  dst.title = src.title;
  dst.text = src.text;
  dst.level = src.level;
  dst.index = new_index;
  for (const auto& child : src.children) {
    if (blocked.contains(lower(text::normalize_space(child.title)))) continue;
    Section c;
    if (rebuild(child, new_index.child(static_cast<int>(dst.children.size()) + 1),
                blocked, remap, c)) {
      dst.children.push_back(std::move(c));
    }
  }
  if (!new_index.is_root() && !dst.has_text() && dst.children.empty()) return false;
  remap[src.index] = new_index;
  return true;
}

}  // namespace

Article filter_sections(const Article& article,
                        const std::vector<std::string>& blocklist) {
  std::set<std::string> blocked;
  for (const auto& b : blocklist) blocked.insert(lower(text::normalize_space(b)));

  Article out;
  out.title = article.title;
  out.description = article.description;
  out.language = article.language;
  out.source_url = article.source_url;
  out.category = article.category;
  std::map<SectionIndex, SectionIndex> remap;
  rebuild(article.root, SectionIndex{}, blocked, remap, out.root);
  for (const auto& img : article.images) {
    auto it = remap.find(img.section_index);
    if (it == remap.end()) continue;
    ImageAsset copy = img;
    copy.section_index = it->second;
    out.images.push_back(std::move(copy));
  }
  attach_image_refs(out);
  return out;
}

}  // namespace storyweaver
