#include "storyweaver/layout.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "storyweaver/text.h"

namespace storyweaver {

using nlohmann::json;

std::string to_string(TemplateFamily family) {
  return family == TemplateFamily::short_text ? "short_text" : "long_text";
}

bool Rect::within_unit_page() const {
  constexpr double eps = 1e-9;
  return x >= -eps && y >= -eps && w > 0 && h > 0 && x + w <= 1 + eps &&
         y + h <= 1 + eps;
}

double overlap_area(const Rect& a, const Rect& b) {
  double w = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
  double h = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
  return (w > 0 && h > 0) ? w * h : 0.0;
}

namespace {

LayoutTemplate make(TemplateFamily f, int n, const char* name, Rect image, Rect textr,
                    std::vector<Rect> deco, double scale, bool scrim) {
  LayoutTemplate t;
  t.family = f;
  t.id = std::string(f == TemplateFamily::short_text ? "short-" : "long-") +
         std::to_string(n);
  t.name = name;
  t.image_slot = image;
  t.text_slot = textr;
  t.decoration_slots = std::move(deco);
  t.base_font_scale = scale;
  t.scrim = scrim;
  return t;
}

json rect_json(const Rect& r) { return json::array({r.x, r.y, r.w, r.h}); }

Rect rect_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    throw ValidationError(where + ": expected [x, y, w, h]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

TemplateGallery TemplateGallery::builtin() {
  using F = TemplateFamily;
  constexpr F S = F::short_text;
  constexpr F L = F::long_text;
  TemplateGallery g;
  g.short_text_ = {
      make(S, 0, "image-top", {0, 0, 1, 0.62}, {0.06, 0.66, 0.88, 0.28},
           {{0, 0.62, 1, 0.015}}, 1.0, false),
      make(S, 1, "image-bottom", {0, 0.38, 1, 0.62}, {0.06, 0.06, 0.88, 0.28},
           {{0, 0.365, 1, 0.015}}, 1.0, false),
      make(S, 2, "overlay-bottom", {0, 0, 1, 1}, {0.06, 0.70, 0.88, 0.24},
           {{0.06, 0.68, 0.2, 0.008}}, 1.0, true),
      make(S, 3, "overlay-top", {0, 0, 1, 1}, {0.06, 0.06, 0.88, 0.24},
           {{0.06, 0.31, 0.2, 0.008}}, 1.0, true),
      make(S, 4, "framed", {0.08, 0.08, 0.84, 0.56}, {0.08, 0.68, 0.84, 0.26},
           {{0, 0, 1, 0.04}, {0, 0.96, 1, 0.04}}, 1.0, false),
      make(S, 5, "side-band", {0, 0, 1, 0.7}, {0.08, 0.72, 0.86, 0.24},
           {{0, 0.7, 0.04, 0.3}}, 1.0, false),
      make(S, 6, "header-band", {0, 0.12, 1, 0.58}, {0.06, 0.73, 0.88, 0.22},
           {{0, 0, 1, 0.1}}, 1.0, false),
      make(S, 7, "card", {0, 0, 1, 1}, {0.08, 0.56, 0.84, 0.34},
           {{0.08, 0.54, 0.84, 0.01}}, 1.0, true),
  };
  g.long_text_ = {
      make(L, 0, "image-top", {0, 0, 1, 0.45}, {0.06, 0.49, 0.88, 0.46},
           {{0, 0.45, 1, 0.012}}, 0.9, false),
      make(L, 1, "image-bottom", {0, 0.55, 1, 0.45}, {0.06, 0.05, 0.88, 0.46},
           {{0, 0.538, 1, 0.012}}, 0.9, false),
      make(L, 2, "overlay-bottom", {0, 0, 1, 1}, {0.06, 0.5, 0.88, 0.44},
           {{0.06, 0.48, 0.3, 0.008}}, 0.9, true),
      make(L, 3, "framed", {0.06, 0.06, 0.88, 0.38}, {0.06, 0.48, 0.88, 0.46},
           {{0, 0, 0.03, 1}}, 0.9, false),
      make(L, 4, "side-band", {0, 0, 1, 0.4}, {0.1, 0.44, 0.84, 0.5},
           {{0, 0.4, 0.06, 0.6}}, 0.9, false),
      make(L, 5, "overlay-top", {0, 0, 1, 1}, {0.06, 0.06, 0.88, 0.44},
           {{0.06, 0.52, 0.3, 0.008}}, 0.9, true),
  };
  return g;
}

json TemplateGallery::to_json() const {
  auto family_json = [](const std::vector<LayoutTemplate>& ts) {
    json arr = json::array();
    for (const auto& t : ts) {
      json deco = json::array();
      for (const auto& d : t.decoration_slots) deco.push_back(rect_json(d));
      arr.push_back({{"id", t.id},
                     {"name", t.name},
                     {"image_slot", rect_json(t.image_slot)},
                     {"text_slot", rect_json(t.text_slot)},
                     {"decoration_slots", deco},
                     {"base_font_scale", t.base_font_scale},
                     {"scrim", t.scrim}});
    }
    return arr;
  };
  return {{"format_version", kFormatVersion},
          {"short_text", family_json(short_text_)},
          {"long_text", family_json(long_text_)}};
}

TemplateGallery TemplateGallery::from_json(const json& doc) {
  if (!doc.is_object() || doc.value("format_version", 0) != kFormatVersion) {
    throw ValidationError("template gallery: unsupported or missing format_version");
  }
  TemplateGallery g;
  auto read = [&](const char* key, TemplateFamily f, std::vector<LayoutTemplate>& out) {
    if (!doc.contains(key) || !doc[key].is_array()) {
      throw ValidationError(std::string("template gallery: missing ") + key);
    }
    for (const auto& t : doc[key]) {
      std::string where = std::string("template gallery ") + key;
      LayoutTemplate lt;
      lt.family = f;
      lt.id = t.at("id").get<std::string>();
      lt.name = t.value("name", lt.id);
      lt.image_slot = rect_from(t.at("image_slot"), where);
      lt.text_slot = rect_from(t.at("text_slot"), where);
      for (const auto& d : t.value("decoration_slots", json::array())) {
        lt.decoration_slots.push_back(rect_from(d, where));
      }
      lt.base_font_scale = t.value("base_font_scale", 1.0);
      lt.scrim = t.value("scrim", false);
      out.push_back(std::move(lt));
    }
  };
  try {
    read("short_text", TemplateFamily::short_text, g.short_text_);
    read("long_text", TemplateFamily::long_text, g.long_text_);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("template gallery: ") + e.what());
  }
  g.validate();
  return g;
}

TemplateGallery TemplateGallery::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read template gallery " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ValidationError("template gallery " + path.string() + ": " + e.what());
  }
}

const LayoutTemplate* TemplateGallery::find(const std::string& id) const {
  for (const auto* fam : {&short_text_, &long_text_}) {
    for (const auto& t : *fam) {
      if (t.id == id) return &t;
    }
  }
  return nullptr;
}

void TemplateGallery::validate() const {
  if (short_text_.size() < 2 || long_text_.size() < 2) {
    throw ValidationError("template gallery: each family needs at least 2 designs");
  }
  for (const auto* fam : {&short_text_, &long_text_}) {
    for (const auto& t : *fam) {
      if (!t.image_slot.within_unit_page() || !t.text_slot.within_unit_page()) {
        throw ValidationError("template " + t.id + ": slot outside the page");
      }
      for (const auto& d : t.decoration_slots) {
        if (!d.within_unit_page()) {
          throw ValidationError("template " + t.id + ": decoration outside the page");
        }
      }
      if (!t.scrim && overlap_area(t.image_slot, t.text_slot) >
                          0.15 * t.text_slot.area() + 1e-12) {
        throw ValidationError("template " + t.id +
                              ": image overlaps text by more than 15% without a scrim");
      }
      if (t.base_font_scale <= 0) {
        throw ValidationError("template " + t.id + ": base_font_scale must be positive");
      }
    }
  }
}

TemplateFamily choose_family(const SummaryMap& summaries) {
  if (summaries.empty()) return TemplateFamily::short_text;
  double total = 0;
  for (const auto& [_, s] : summaries) {
    total += static_cast<double>(text::char_count(s.text()));
  }
  return total / static_cast<double>(summaries.size()) > 200.0
             ? TemplateFamily::long_text
             : TemplateFamily::short_text;
}

std::size_t select_template(int page_ordinal, std::size_t family_size, bool cover) {
  if (cover || family_size == 0) return 0;
  return static_cast<std::size_t>(page_ordinal) % family_size;
}

CropRect compute_crop(int width, int height, double aspect) {
  if (width <= 0 || height <= 0 || !(aspect > 0)) {
    throw std::invalid_argument("compute_crop: dimensions and aspect must be positive");
  }
  constexpr double eps = 1e-9;
  const double image_aspect = static_cast<double>(width) / height;
  CropRect c{0, 0, width, height};
  if (image_aspect > aspect + eps) {
    c.width = std::clamp(static_cast<int>(std::floor(height * aspect + eps)), 1, width);
    c.x = (width - c.width + 1) / 2;
  } else if (image_aspect < aspect - eps) {
    c.height = std::clamp(static_cast<int>(std::floor(width / aspect + eps)), 1, height);
    c.y = (height - c.height + 1) / 2;
  }
  return c;
}

double fit_text(std::string_view snippet, [[maybe_unused]] const Rect& text_slot,
                double base_font_scale) {
  std::size_t n = text::char_count(snippet);
  double scale = n <= 80 ? 1.0 : (n <= 200 ? 0.85 : 0.7);
  return scale * base_font_scale;
}

std::string Rgb::hex() const {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

Rgb Rgb::parse_hex(std::string_view s) {
  bool ok = s.size() == 7 && s[0] == '#' &&
            std::all_of(s.begin() + 1, s.end(),
                        [](char ch) { return std::isxdigit(static_cast<unsigned char>(ch)); });
  if (!ok) throw ConfigError("expected #rrggbb color, got '" + std::string(s) + "'");
  auto byte = [&](std::size_t at) {
    return static_cast<std::uint8_t>(std::stoi(std::string(s.substr(at, 2)), nullptr, 16));
  };
  return {byte(1), byte(3), byte(5)};
}

Rgb dominant_color(const Raster& pixels) {
  if (pixels.rgb.size() < 3) throw std::invalid_argument("dominant_color: empty raster");
  struct Bucket {
    std::size_t count = 0;
    std::array<std::uint64_t, 3> sum{};
  };
  std::vector<Bucket> buckets(4096);
  for (std::size_t i = 0; i + 2 < pixels.rgb.size(); i += 3) {
    std::uint8_t r = pixels.rgb[i], g = pixels.rgb[i + 1], b = pixels.rgb[i + 2];
    Bucket& bk = buckets[static_cast<std::size_t>((r >> 4) << 8 | (g >> 4) << 4 | (b >> 4))];
    ++bk.count;
    bk.sum[0] += r;
    bk.sum[1] += g;
    bk.sum[2] += b;
  }
  auto mean = [](const Bucket& bk) {
    auto m = [&](int c) {
      return static_cast<std::uint8_t>((bk.sum[c] + bk.count / 2) / bk.count);
    };
    return Rgb{m(0), m(1), m(2)};
  };
  const Bucket* best = nullptr;
  Rgb best_color;
  for (const auto& bk : buckets) {
    if (bk.count == 0) continue;
    Rgb c = mean(bk);
    if (best == nullptr || bk.count > best->count ||
        (bk.count == best->count && c.luma() < best_color.luma())) {
      best = &bk;
      best_color = c;
    }
  }
  return best_color;
}

std::map<std::string, Rgb> image_colors(const Article& article, Rgb fallback,
                                        Diagnostics& warnings) {
  std::map<std::string, Rgb> out;
  for (const auto& img : article.images) {
    Rgb color = fallback;
    if (!img.local_file.empty()) {
      auto raster = decode_raster_file(img.local_file);
      if (raster && !raster->empty()) {
        color = dominant_color(*raster);
      } else {
        warnings.push_back({"layout", img.section_index.str(),
                            "image '" + img.id +
                                "' could not be decoded; using fallback color"});
      }
    }
    out[img.id] = color;
  }
  return out;
}

LayoutMap layout_pages(StorySet& stories, const Article& article, TemplateFamily family,
                       const TemplateGallery& gallery,
                       const std::map<std::string, Rgb>& colors, Rgb fallback) {
  const auto& designs = gallery.family(family);
  LayoutMap out;
  for (auto& story : stories.stories) {
    for (std::size_t k = 0; k < story.pages.size(); ++k) {
      Page& page = story.pages[k];
      if (page.kind == PageKind::end) continue;
      const bool cover = page.kind == PageKind::cover;
      const LayoutTemplate& t =
          designs[select_template(static_cast<int>(k), designs.size(), cover)];
      PageLayout layout;
      layout.template_id = t.id;
      layout.decoration_color = fallback;
      layout.font_size =
          fit_text(cover ? page.heading : page.snippet, t.text_slot, t.base_font_scale);
      const ImageAsset* img =
          page.image_ref ? article.find_image(*page.image_ref) : nullptr;
      if (img != nullptr && img->has_resolution()) {
        layout.crop = compute_crop(img->width, img->height, t.image_slot.aspect_on_page());
        if (auto it = colors.find(img->id); it != colors.end()) {
          layout.decoration_color = it->second;
        }
      } else {
        layout.text_only = true;
      }
      page.template_id = t.id;
      out[{story.id, static_cast<int>(k)}] = layout;
    }
  }
  return out;
}

}  // namespace storyweaver
