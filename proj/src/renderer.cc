#include "storyweaver/renderer.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <set>
#include <sstream>

#include "storyweaver/html.h"
#include "storyweaver/text.h"

namespace storyweaver {

namespace fs = std::filesystem;
using html::Node;
using nlohmann::json;

namespace {

constexpr const char* kBoilerplate =
    "body{-webkit-animation:-amp-start 8s steps(1,end) 0s 1 normal both;"
    "-moz-animation:-amp-start 8s steps(1,end) 0s 1 normal both;"
    "-ms-animation:-amp-start 8s steps(1,end) 0s 1 normal both;"
    "animation:-amp-start 8s steps(1,end) 0s 1 normal both}"
    "@-webkit-keyframes -amp-start{from{visibility:hidden}to{visibility:visible}}"
    "@-moz-keyframes -amp-start{from{visibility:hidden}to{visibility:visible}}"
    "@-ms-keyframes -amp-start{from{visibility:hidden}to{visibility:visible}}"
    "@-o-keyframes -amp-start{from{visibility:hidden}to{visibility:visible}}"
    "@keyframes -amp-start{from{visibility:hidden}to{visibility:visible}}";

constexpr const char* kBoilerplateNoscript =
    "body{-webkit-animation:none;-moz-animation:none;-ms-animation:none;animation:none}";

constexpr const char* kCustomCss =
    "amp-story-page{background:#111;color:#fff;font-family:Georgia,serif}"
    ".slot{position:absolute;box-sizing:border-box}"
    ".text{display:flex;flex-direction:column;justify-content:flex-end;padding:3%}"
    ".scrim{background:linear-gradient(rgba(0,0,0,0.15),rgba(0,0,0,0.7))}"
    "h1{font-size:2em;margin:0 0 .3em}"
    "h2{font-size:1.4em;margin:0 0 .4em}"
    "p{margin:0;line-height:1.35}"
    ".nav{list-style:none;margin:0;padding:0}"
    ".nav li{margin:.5em 0}"
    "a{color:#fff}";

// Fixed-point with trailing zeros dropped.
std::string num(double v, int precision = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  std::string s = os.str();
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

std::string rect_style(const Rect& r) {
  return "left:" + num(r.x * 100) + "%;top:" + num(r.y * 100) + "%;width:" +
         num(r.w * 100) + "%;height:" + num(r.h * 100) + "%";
}

std::string object_position(const CropRect& c, int w, int h) {
  auto axis = [](int off, int full, int size) {
    return full > size ? num(100.0 * off / (full - size)) + "%" : std::string("50%");
  };
  return axis(c.x, w, c.width) + " " + axis(c.y, h, c.height);
}

// Relative path of each bundled image in offline mode.
std::map<std::string, std::string> asset_paths(const CompiledArticle& compiled,
                                               const RenderOptions& options) {
  std::map<std::string, std::string> out;
  if (!options.offline_assets) return out;
  std::set<std::string> taken;
  for (const auto& img : compiled.article.images) {
    if (img.local_file.empty()) continue;
    fs::path p(img.local_file);
    std::string stem = text::slugify(p.stem().string());
    if (stem.empty()) stem = "image";
    std::string ext = p.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::string name = "assets/" + stem + ext;
    for (int n = 2; taken.contains(name); ++n) {
      name = "assets/" + stem + "-" + std::to_string(n) + ext;
    }
    taken.insert(name);
    out[img.id] = name;
  }
  return out;
}

std::string image_src(const ImageAsset& img, const std::map<std::string, std::string>& assets) {
  auto it = assets.find(img.id);
  return it != assets.end() ? it->second : img.source_url;
}

std::string page_element_id(const Page& page, std::size_t ordinal) {
  switch (page.kind) {
    case PageKind::cover: return "cover";
    case PageKind::end: return "end";
    default: return "page-" + std::to_string(ordinal);
  }
}

class StoryRenderer {
 public:
  StoryRenderer(const Story& story, const CompiledArticle& compiled,
                const RenderOptions& options, Diagnostics& warnings)
      : story_(story),
        c_(compiled),
        options_(options),
        warnings_(warnings),
        assets_(asset_paths(compiled, options)) {}

  std::string run() {
    Node root = Node::element("html", {{"amp", ""}, {"lang", c_.article.language}});
    root.add(head());
    Node& body = root.add(Node::element("body"));
    Node& amp_story = body.add(Node::element(
        "amp-story", {{"standalone", ""},
                      {"title", story_.title},
                      {"publisher", options_.publisher},
                      {"publisher-logo-src", options_.publisher_logo},
                      {"poster-portrait-src", poster()}}));
    for (std::size_t k = 0; k < story_.pages.size(); ++k) {
      amp_story.add(page(story_.pages[k], k));
    }
    return html::serialize_document(root);
  }

 private:
  Node head() const {
    Node h = Node::element("head");
    h.add(Node::element("meta", {{"charset", "utf-8"}}));
    h.add(Node::element("title")).add_text(story_.title);
    h.add(Node::element("link", {{"href", story_.id + ".html"}, {"rel", "canonical"}}));
    h.add(Node::element("meta", {{"content", "width=device-width,minimum-scale=1,initial-scale=1"},
                                 {"name", "viewport"}}));
    h.add(Node::element("script", {{"async", ""}, {"src", "https://cdn.ampproject.org/v0.js"}}));
    h.add(Node::element("script",
                        {{"async", ""},
                         {"custom-element", "amp-story"},
                         {"src", "https://cdn.ampproject.org/v0/amp-story-1.0.js"}}));
    h.add(Node::element("style", {{"amp-boilerplate", ""}})).add_text(kBoilerplate);
    h.add(Node::element("noscript"))
        .add(Node::element("style", {{"amp-boilerplate", ""}}))
        .add_text(kBoilerplateNoscript);
    h.add(Node::element("style", {{"amp-custom", ""}})).add_text(kCustomCss);
    return h;
  }

  const ImageAsset* image_for(const Page& page) const {
    if (!page.image_ref) return nullptr;
    return c_.article.find_image(*page.image_ref);
  }

  std::string poster() const {
    for (const auto& p : story_.pages) {
      if (const ImageAsset* img = image_for(p)) return image_src(*img, assets_);
    }
    return options_.publisher_logo;
  }

  const PageLayout* layout_for(std::size_t k) const {
    auto it = c_.layouts.find({story_.id, static_cast<int>(k)});
    return it == c_.layouts.end() ? nullptr : &it->second;
  }

  Node page(const Page& p, std::size_t k) {
    Node el = Node::element("amp-story-page", {{"id", page_element_id(p, k)},
                                               {"data-kind", to_string(p.kind)},
                                               {"data-section", p.section_index.str()}});
    if (p.kind == PageKind::end) {
      end_page(el, p);
      return el;
    }
    const PageLayout* layout = layout_for(k);
    if (layout == nullptr) {
      throw ValidationError("no layout for page " + std::to_string(k) + " of story " +
                            story_.id);
    }
    const LayoutTemplate* t = c_.gallery.find(layout->template_id);
    if (t == nullptr) throw ValidationError("unknown template " + layout->template_id);
    el.attrs["data-template"] = t->id;
    if (p.overflow) el.attrs["data-overflow"] = "true";
    if (p.truncated) el.attrs["data-truncated"] = "true";

    const ImageAsset* img = image_for(p);
    if (p.image_ref && img == nullptr) {
      warnings_.push_back({"render", p.section_index.str(),
                           "story " + story_.id + " page " + std::to_string(k) +
                               ": image '" + *p.image_ref +
                               "' does not resolve; rendered text-only"});
    }
    if (img != nullptr && layout->crop) {
      el.add(image_layer(*img, *layout->crop, *t));
    } else {
      el.attrs["data-text-only"] = "true";
    }
    el.add(decoration_layer(*t, layout->decoration_color));
    el.add(text_layer(p, *t, layout->font_size));
    if (p.kind == PageKind::content) {
      el.add(Node::element("amp-story-page-outlink", {{"layout", "nodisplay"}}))
          .add(Node::element("a", {{"href", p.source_anchor}}))
          .add_text("Read Full Article");
    }
    return el;
  }

  Node image_layer(const ImageAsset& img, const CropRect& crop, const LayoutTemplate& t) {
    Node layer = Node::element("amp-story-grid-layer",
                               {{"data-layer", "image"}, {"template", "vertical"}});
    Node& slot = layer.add(
        Node::element("div", {{"class", "slot image"}, {"style", rect_style(t.image_slot)}}));
    slot.add(Node::element(
        "amp-img",
        {{"alt", img.caption.empty() ? img.id : img.caption},
         {"data-crop", std::to_string(crop.x) + "," + std::to_string(crop.y) + "," +
                           std::to_string(crop.width) + "," + std::to_string(crop.height)},
         {"data-license", img.license_tag},
         {"data-source", img.source_url},
         {"height", std::to_string(img.height)},
         {"layout", "fill"},
         {"object-fit", "cover"},
         {"object-position", object_position(crop, img.width, img.height)},
         {"src", image_src(img, assets_)},
         {"width", std::to_string(img.width)}}));
    return layer;
  }

  static Node decoration_layer(const LayoutTemplate& t, const Rgb& color) {
    Node layer = Node::element("amp-story-grid-layer",
                               {{"data-layer", "decoration"}, {"template", "vertical"}});
    for (const auto& d : t.decoration_slots) {
      layer.add(Node::element(
          "div", {{"class", "slot decoration"},
                  {"style", rect_style(d) + ";background-color:" + color.hex()}}));
    }
    return layer;
  }

  static Node text_layer(const Page& p, const LayoutTemplate& t, double font_size) {
    Node layer = Node::element("amp-story-grid-layer",
                               {{"data-layer", "text"}, {"template", "vertical"}});
    std::string cls = t.scrim ? "slot text scrim" : "slot text";
    Node& box = layer.add(Node::element(
        "div", {{"class", cls},
                {"style", rect_style(t.text_slot) + ";font-size:" + num(font_size, 4) + "em"}}));
    if (p.kind == PageKind::cover) {
      box.add(Node::element("h1")).add_text(p.heading);
      if (!p.snippet.empty()) {
        box.add(Node::element("p", {{"class", "description"}})).add_text(p.snippet);
      }
    } else {
      box.add(Node::element("h2")).add_text(p.heading);
      box.add(Node::element("p", {{"class", "snippet"}})).add_text(p.snippet);
    }
    return layer;
  }

  void end_page(Node& el, const Page& p) const {
    Node& layer = el.add(Node::element("amp-story-grid-layer",
                                       {{"data-layer", "text"}, {"template", "vertical"}}));
    layer.add(Node::element("h2")).add_text(p.heading);
    if (!p.nav_targets.empty()) {
      Node& ul = layer.add(Node::element("ul", {{"class", "nav"}}));
      for (const auto& target : p.nav_targets) {
        const Story* s = c_.stories.find(target);
        ul.add(Node::element("li"))
            .add(Node::element("a", {{"href", target + ".html"}}))
            .add_text(s != nullptr ? s->title : target);
      }
    }
    layer.add(Node::element("p"))
        .add(Node::element("a", {{"class", "full-article"}, {"href", p.source_anchor}}))
        .add_text("Read Full Article");
  }

  const Story& story_;
  const CompiledArticle& c_;
  const RenderOptions& options_;
  Diagnostics& warnings_;
  std::map<std::string, std::string> assets_;
};

json nullable(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string render_story(const Story& story, const CompiledArticle& compiled,
                         const RenderOptions& options, Diagnostics& warnings) {
  return StoryRenderer(story, compiled, options, warnings).run();
}

json build_manifest(const CompiledArticle& c) {
  std::map<PageKey, const Assignment*> by_page;
  for (const auto& a : c.assignments) by_page[{a.story_id, a.page_ordinal}] = &a;

  json text_secs = json::array();
  for (const Section* s : text_sections(c.article.root)) text_secs.push_back(s->index.str());

  json article = {{"title", c.article.title},
                  {"source_url", c.article.source_url},
                  {"language", c.article.language},
                  {"category", c.article.category},
                  {"section_count", flatten_preorder(c.article.root).size() - 1},
                  {"image_count", c.article.images.size()},
                  {"text_sections", text_secs}};

  json stories = json::array();
  json pages = json::array();
  for (const auto& s : c.stories.stories) {
    stories.push_back({{"id", s.id},
                       {"kind", to_string(s.kind)},
                       {"title", s.title},
                       {"section_index", s.section_index.str()},
                       {"part", s.part},
                       {"strategy", to_string(s.strategy)},
                       {"document", s.id + ".html"},
                       {"page_count", s.pages.size()},
                       {"links", s.outgoing_links}});
    for (std::size_t k = 0; k < s.pages.size(); ++k) {
      const Page& p = s.pages[k];
      PageKey key{s.id, static_cast<int>(k)};
      json row = {{"story_id", s.id},
                  {"page_ordinal", k},
                  {"kind", to_string(p.kind)},
                  {"section_index", p.section_index.str()},
                  {"image_id", nullable(p.image_ref)},
                  {"summary_origin", p.origin ? json(to_string(*p.origin)) : json(nullptr)},
                  {"truncated", p.truncated},
                  {"overflow", p.overflow},
                  {"preview", p.preview},
                  {"template_id", nullable(p.template_id)}};
      if (auto it = by_page.find(key); it != by_page.end()) {
        row["similarity"] = round_to(it->second->similarity, 1e6);
        row["fallback_reason"] = it->second->fallback_reason
                                     ? json(to_string(*it->second->fallback_reason))
                                     : json(nullptr);
      } else {
        row["similarity"] = nullptr;
        row["fallback_reason"] = nullptr;
      }
      if (auto it = c.layouts.find(key); it != c.layouts.end()) {
        const PageLayout& l = it->second;
        row["crop"] = l.crop ? json::array({l.crop->x, l.crop->y, l.crop->width,
                                            l.crop->height})
                             : json(nullptr);
        row["font_size"] = round_to(l.font_size, 1e4);
        row["decoration_color"] = l.decoration_color.hex();
        row["text_only"] = l.text_only;
      }
      pages.push_back(std::move(row));
    }
  }

  json sections = json::array();
  for (const auto& r : c.stories.sections) {
    std::optional<std::string> image;
    if (const Story* s = c.stories.find(r.story_id)) {
      if (r.page_ordinal >= 0 && static_cast<std::size_t>(r.page_ordinal) < s->pages.size()) {
        image = s->pages[static_cast<std::size_t>(r.page_ordinal)].image_ref;
      }
    }
    sections.push_back({{"section_index", r.section_index.str()},
                        {"story_id", r.story_id},
                        {"page_ordinal", r.page_ordinal},
                        {"page_count", r.page_count},
                        {"image_id", nullable(image)},
                        {"summary_origin", to_string(r.origin)},
                        {"truncated", r.truncated},
                        {"overflow", r.overflow}});
  }

  json warnings = json::array();
  for (const auto& w : c.warnings) {
    warnings.push_back(
        {{"stage", w.stage}, {"section_index", w.section_index}, {"message", w.message}});
  }

  return {{"format_version", 1},
          {"article", article},
          {"mode", to_string(c.stories.mode)},
          {"entry", c.stories.entry},
          {"family", to_string(c.family)},
          {"limits", {{"max_pages", c.max_pages}, {"max_chars_per_page", c.max_chars_per_page}}},
          {"stories", stories},
          {"sections", sections},
          {"pages", pages},
          {"warnings", warnings}};
}

json build_assets(const CompiledArticle& c, const RenderOptions& options) {
  auto paths = asset_paths(c, options);
  std::map<std::string, json> used;
  for (const auto& s : c.stories.stories) {
    for (std::size_t k = 0; k < s.pages.size(); ++k) {
      if (s.pages[k].image_ref) {
        auto& u = used[*s.pages[k].image_ref];
        if (u.is_null()) u = json::array();
        u.push_back({{"story_id", s.id}, {"page_ordinal", k}});
      }
    }
  }
  json images = json::array();
  for (const auto& img : c.article.images) {
    auto p = paths.find(img.id);
    images.push_back({{"id", img.id},
                      {"source_url", img.source_url},
                      {"license", img.license_tag},
                      {"caption", img.caption},
                      {"dataset_caption", img.dataset_caption},
                      {"width", img.width},
                      {"height", img.height},
                      {"section_index", img.section_index.str()},
                      {"bundled_path", p != paths.end() ? json(p->second) : json(nullptr)},
                      {"used_by", used.contains(img.id) ? used[img.id] : json::array()}});
  }
  return {{"format_version", 1}, {"images", images}};
}

std::string render_index(const CompiledArticle& c) {
  Node root = Node::element("html", {{"lang", c.article.language}});
  Node& head = root.add(Node::element("head"));
  head.add(Node::element("meta", {{"charset", "utf-8"}}));
  head.add(Node::element("title")).add_text(c.article.title);
  head.add(Node::element("meta", {{"content", "width=device-width,initial-scale=1"},
                                  {"name", "viewport"}}));
  Node& body = root.add(Node::element("body"));
  body.add(Node::element("h1")).add_text(c.article.title);
  if (!c.article.description.empty()) body.add(Node::element("p")).add_text(c.article.description);
  body.add(Node::element("p"))
      .add(Node::element("a", {{"class", "entry"}, {"href", c.stories.entry + ".html"}}))
      .add_text("Start reading");
  Node& ul = body.add(Node::element("ul", {{"class", "stories"}}));
  for (const auto& s : c.stories.stories) {
    ul.add(Node::element("li"))
        .add(Node::element("a", {{"href", s.id + ".html"}}))
        .add_text(s.title);
  }
  return html::serialize_document(root);
}

namespace {

void write_file(const fs::path& p, std::string_view data) {
  std::ofstream out(p, std::ios::binary);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw IoError("cannot write " + p.string());
}

}  // namespace

void render_bundle(CompiledArticle& compiled, const fs::path& out_dir,
                   const RenderOptions& options) {
  auto assets = asset_paths(compiled, options);
  if (options.offline_assets) {
    for (const auto& img : compiled.article.images) {
      if (!assets.contains(img.id)) {
        compiled.warnings.push_back({"render", img.section_index.str(),
                                     "image '" + img.id +
                                         "' has no local file; referenced by URL"});
      }
    }
  }

  // Stories render concurrently; warnings merge in story order.
  std::vector<std::future<std::pair<std::string, Diagnostics>>> jobs;
  for (const auto& story : compiled.stories.stories) {
    jobs.push_back(std::async(std::launch::async, [&compiled, &options, &story] {
      Diagnostics w;
      std::string doc = render_story(story, compiled, options, w);
      return std::make_pair(std::move(doc), std::move(w));
    }));
  }
  std::vector<std::string> docs;
  for (auto& j : jobs) {
    auto [doc, w] = j.get();
    docs.push_back(std::move(doc));
    compiled.warnings.insert(compiled.warnings.end(), w.begin(), w.end());
  }
  const std::string manifest = build_manifest(compiled).dump(2) + "\n";
  const std::string assets_json = build_assets(compiled, options).dump(2) + "\n";
  const std::string index = render_index(compiled);

  fs::path target = fs::absolute(out_dir).lexically_normal();
  if (target.filename().empty()) target = target.parent_path();
  fs::path parent = target.parent_path();
  const std::string pid = std::to_string(::getpid());
  fs::path staging = parent / ("." + target.filename().string() + ".staging-" + pid);
  std::error_code ec;
  fs::create_directories(parent, ec);
  fs::remove_all(staging, ec);
  if (!fs::create_directory(staging, ec) || ec) {
    throw IoError("cannot create output directory next to " + target.string() + ": " +
                  ec.message());
  }
  try {
    write_file(staging / "index.html", index);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      write_file(staging / (compiled.stories.stories[i].id + ".html"), docs[i]);
    }
    write_file(staging / "manifest.json", manifest);
    write_file(staging / "assets.json", assets_json);
    if (!assets.empty()) {
      fs::create_directory(staging / "assets");
      for (const auto& img : compiled.article.images) {
        auto it = assets.find(img.id);
        if (it != assets.end()) fs::copy_file(img.local_file, staging / it->second);
      }
    }
    if (fs::exists(target)) {
      fs::path old = parent / ("." + target.filename().string() + ".old-" + pid);
      fs::remove_all(old);
      fs::rename(target, old);
      fs::rename(staging, target);
      fs::remove_all(old);
    } else {
      fs::rename(staging, target);
    }
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw IoError(e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

std::string to_string(const Violation& v) {
  return v.document + ": [" + v.kind + "] " + v.message;
}

std::vector<Violation> validate_story_html(std::string_view document,
                                           const StoryCheckLimits& limits,
                                           const std::string& name) {
  std::vector<Violation> out;
  auto add = [&](const std::string& kind, const std::string& msg) {
    out.push_back({name, kind, msg});
  };
  html::ParseResult parsed = html::parse(document);
  for (const auto& e : parsed.errors) add("markup", e);

  const Node* root = parsed.document.find_first("html");
  if (root == nullptr) {
    add("structure", "no <html> element");
    return out;
  }
  if (!root->has_attr("amp")) add("structure", "<html> lacks the amp attribute");
  auto stories = root->find_all("amp-story");
  if (stories.size() != 1) {
    add("structure", "expected exactly one <amp-story>, found " +
                         std::to_string(stories.size()));
    if (stories.empty()) return out;
  }
  std::vector<const Node*> pages;
  for (const Node* c : stories.front()->element_children()) {
    if (c->tag == "amp-story-page") pages.push_back(c);
  }
  const int n = static_cast<int>(pages.size());
  if (n < limits.min_pages || n > limits.max_pages) {
    add("length", std::to_string(n) + " pages; expected " + std::to_string(limits.min_pages) +
                      " to " + std::to_string(limits.max_pages));
  }
  std::set<std::string> ids;
  for (int k = 0; k < n; ++k) {
    const Node& p = *pages[static_cast<std::size_t>(k)];
    std::string where = "page " + std::to_string(k);
    std::string id = p.attr("id");
    if (id.empty()) add("structure", where + " has no id");
    else if (!ids.insert(id).second) add("structure", "duplicate page id " + id);

    std::string kind = p.attr("data-kind");
    std::string expected = k == 0 ? "cover" : (k == n - 1 ? "end" : "content");
    if (kind != expected) {
      add("structure", where + " is '" + kind + "', expected '" + expected + "'");
    }
    if (p.find_first("amp-story-grid-layer") == nullptr) {
      add("structure", where + " has no grid layer");
    }
    for (const Node* img : p.find_all("amp-img")) {
      for (const char* a : {"src", "width", "height", "data-source", "data-license"}) {
        if (img->attr(a).empty()) add("image", where + " image lacks " + a);
      }
    }
    if (kind != "content") continue;
    const Node* snippet = nullptr;
    for (const Node* para : p.find_all("p")) {
      if (para->has_class("snippet")) snippet = para;
    }
    if (snippet == nullptr) {
      add("structure", where + " has no text snippet");
    } else if (!p.has_attr("data-overflow")) {
      std::size_t chars = text::char_count(snippet->inner_text());
      if (chars > static_cast<std::size_t>(limits.max_snippet_chars)) {
        add("snippet", where + " snippet has " + std::to_string(chars) +
                           " characters and is not flagged overflow");
      }
    }
    if (p.find_first("amp-img") == nullptr && !p.has_attr("data-text-only")) {
      add("structure", where + " has no image and is not flagged text-only");
    }
    const Node* outlink = p.find_first("amp-story-page-outlink");
    const Node* a = outlink != nullptr ? outlink->find_first("a") : nullptr;
    if (a == nullptr || a->attr("href").empty()) {
      add("structure", where + " has no Read Full Article link");
    }
  }
  return out;
}

namespace {

bool is_relative_link(const std::string& v) {
  if (v.empty() || v[0] == '#') return false;
  if (v.find("://") != std::string::npos) return false;
  for (const char* scheme : {"mailto:", "data:", "tel:", "javascript:"}) {
    if (v.rfind(scheme, 0) == 0) return false;
  }
  return v[0] != '/';
}

std::optional<std::string> read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_links(const fs::path& dir, const std::string& name, std::string_view doc,
                 std::vector<Violation>& out) {
  html::ParseResult parsed = html::parse(doc);
  std::function<void(const Node&)> walk = [&](const Node& n) {
    for (const auto& c : n.children) {
      if (c.is_text()) continue;
      for (const char* a : {"href", "src"}) {
        std::string v = c.attr(a);
        if (!is_relative_link(v)) continue;
        std::string path = v.substr(0, v.find_first_of("#?"));
        fs::path resolved = (dir / path).lexically_normal();
        auto rel = resolved.lexically_relative(dir);
        if (rel.empty() || *rel.begin() == ".." || !fs::exists(resolved)) {
          out.push_back({name, "link", "dangling link '" + v + "' on <" + c.tag + ">"});
        }
      }
      walk(c);
    }
  };
  walk(parsed.document);
}

}  // namespace

std::vector<Violation> validate_bundle(const fs::path& bundle_dir) {
  std::vector<Violation> out;
  const fs::path dir = fs::absolute(bundle_dir).lexically_normal();
  if (!fs::is_directory(dir)) {
    out.push_back({dir.string(), "structure", "bundle directory does not exist"});
    return out;
  }
  std::vector<std::string> html_files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".html") {
      html_files.push_back(e.path().filename().string());
    }
  }
  std::sort(html_files.begin(), html_files.end());

  json manifest;
  auto manifest_text = read_text(dir / "manifest.json");
  if (!manifest_text) {
    out.push_back({"manifest.json", "manifest", "manifest.json is missing"});
  } else {
    try {
      manifest = json::parse(*manifest_text);
    } catch (const json::parse_error& e) {
      out.push_back({"manifest.json", "manifest", std::string("unparseable: ") + e.what()});
    }
  }

  StoryCheckLimits limits;
  if (manifest.is_object() && manifest.contains("limits")) {
    limits.max_pages = manifest["limits"].value("max_pages", limits.max_pages);
    limits.max_snippet_chars =
        manifest["limits"].value("max_chars_per_page", limits.max_snippet_chars);
  }

  for (const auto& f : html_files) {
    auto doc = read_text(dir / f);
    if (!doc) continue;
    if (f != "index.html") {
      auto v = validate_story_html(*doc, limits, f);
      out.insert(out.end(), v.begin(), v.end());
    }
    check_links(dir, f, *doc, out);
  }
  if (!fs::exists(dir / "index.html")) {
    out.push_back({"index.html", "structure", "index.html is missing"});
  }
  if (!manifest.is_object()) return out;

  try {
    std::map<std::string, std::size_t> story_pages;
    for (const auto& s : manifest.at("stories")) {
      std::string id = s.at("id").get<std::string>();
      std::string docname = s.at("document").get<std::string>();
      story_pages[id] = s.at("page_count").get<std::size_t>();
      auto doc = read_text(dir / docname);
      if (!doc) {
        out.push_back({docname, "structure", "story document listed in manifest is missing"});
        continue;
      }
      html::ParseResult parsed = html::parse(*doc);
      std::size_t n = parsed.document.find_all("amp-story-page").size();
      if (n != story_pages[id]) {
        out.push_back({docname, "manifest",
                       "manifest lists " + std::to_string(story_pages[id]) +
                           " pages, document has " + std::to_string(n)});
      }
    }
    if (!story_pages.contains(manifest.at("entry").get<std::string>())) {
      out.push_back({"manifest.json", "manifest", "entry story is not listed"});
    }

    std::map<PageKey, std::string> page_sections;
    std::set<std::string> image_ids;
    for (const auto& p : manifest.at("pages")) {
      PageKey key{p.at("story_id").get<std::string>(), p.at("page_ordinal").get<int>()};
      page_sections[key] = p.at("section_index").get<std::string>();
      if (p.at("image_id").is_string()) image_ids.insert(p["image_id"].get<std::string>());
    }

    const std::size_t before_rows = out.size();
    std::vector<std::string> expected;
    for (const auto& s : manifest.at("article").at("text_sections")) {
      expected.push_back(s.get<std::string>());
    }
    std::set<std::string> expected_set(expected.begin(), expected.end());
    std::map<std::string, int> seen;
    std::vector<std::string> rows;
    for (const auto& r : manifest.at("sections")) {
      std::string idx = r.at("section_index").get<std::string>();
      rows.push_back(idx);
      if (++seen[idx] == 2) {
        out.push_back({"manifest.json", "bijection", "section " + idx + " has duplicate rows"});
      }
      if (!expected_set.contains(idx)) {
        out.push_back({"manifest.json", "bijection",
                       "row for section " + idx + " which is not a text-bearing section"});
      }
      PageKey key{r.at("story_id").get<std::string>(), r.at("page_ordinal").get<int>()};
      auto it = page_sections.find(key);
      if (it == page_sections.end() || it->second != idx) {
        out.push_back({"manifest.json", "bijection",
                       "section " + idx + " row points at " + key.first + " page " +
                           std::to_string(key.second) + " which does not present it"});
      }
    }
    for (const auto& idx : expected) {
      if (!seen.contains(idx)) {
        out.push_back({"manifest.json", "bijection", "section " + idx + " has no row"});
      }
    }
    if (out.size() == before_rows && rows != expected) {
      out.push_back({"manifest.json", "bijection", "section rows are not in pre-order"});
    }

    auto assets_text = read_text(dir / "assets.json");
    if (!assets_text) {
      out.push_back({"assets.json", "manifest", "assets.json is missing"});
    } else {
      json assets = json::parse(*assets_text);
      std::set<std::string> known;
      for (const auto& a : assets.at("images")) {
        if (!a.at("source_url").get<std::string>().empty()) {
          known.insert(a.at("id").get<std::string>());
        }
      }
      for (const auto& id : image_ids) {
        if (!known.contains(id)) {
          out.push_back({"assets.json", "manifest",
                         "image '" + id + "' has no recorded source URL"});
        }
      }
    }
  } catch (const json::exception& e) {
    out.push_back({"manifest.json", "manifest", std::string("malformed: ") + e.what()});
  }
  return out;
}

}  // namespace storyweaver
