#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "storyweaver/article.h"
#include "storyweaver/image_matcher.h"
#include "storyweaver/planner.h"
#include "storyweaver/raster.h"
#include "storyweaver/summarizer.h"

namespace storyweaver {

// Story pages are portrait 9:16.
inline constexpr double kPageAspect = 9.0 / 16.0;

enum class TemplateFamily { short_text, long_text };

std::string to_string(TemplateFamily family);

// Rectangle in page-fraction units.
struct Rect {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double area() const { return w * h; }
  bool within_unit_page() const;
  // Width:height ratio of this slot on a 9:16 page.
  double aspect_on_page() const { return (w * kPageAspect) / h; }
};

double overlap_area(const Rect& a, const Rect& b);

struct LayoutTemplate {
  std::string id;
  std::string name;
  TemplateFamily family = TemplateFamily::short_text;
  Rect image_slot;
  Rect text_slot;
  std::vector<Rect> decoration_slots;
  double base_font_scale = 1.0;
  // Overlay designs put a contrast scrim behind the text.
  bool scrim = false;
};

// The shipped gallery has 8 short-text and 6 long-text designs.
class TemplateGallery {
 public:
  static constexpr int kFormatVersion = 1;

  static TemplateGallery builtin();
  static TemplateGallery from_json(const nlohmann::json& doc);
  static TemplateGallery load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::vector<LayoutTemplate>& family(TemplateFamily f) const {
    return f == TemplateFamily::short_text ? short_text_ : long_text_;
  }
  const LayoutTemplate* find(const std::string& id) const;

  // Throws ValidationError: slots outside the page, or image/text overlap
  // beyond 15% of the text slot in a design without a scrim.
  void validate() const;

 private:
  std::vector<LayoutTemplate> short_text_;
  std::vector<LayoutTemplate> long_text_;
};

// long_text when the mean summary length exceeds 200 characters.
TemplateFamily choose_family(const SummaryMap& summaries);

// Cover pages use design 0; other pages cycle by ordinal.
std::size_t select_template(int page_ordinal, std::size_t family_size, bool cover = false);

struct CropRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

// Largest centered rectangle of width:height `aspect` inside a w x h image.
// The cropped dimension is floored and its offset rounded toward the center.
CropRect compute_crop(int width, int height, double aspect);

// Relative font size from snippet length: <=80 chars 1.0, 81-200 0.85,
// longer 0.7, times base_font_scale.
double fit_text(std::string_view snippet, const Rect& text_slot, double base_font_scale);

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  std::string hex() const;
  double luma() const { return 0.299 * r + 0.587 * g + 0.114 * b; }
  static Rgb parse_hex(std::string_view s);

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kDefaultFallbackColor{0x44, 0x44, 0x44};

// Mean color of the most populous 4-bit-per-channel bucket; equal counts go
// to the darker bucket. Throws std::invalid_argument on an empty raster.
Rgb dominant_color(const Raster& pixels);

// Dominant colors for images with a decodable local file; others get
// `fallback`, with a warning when a file exists but cannot be decoded.
std::map<std::string, Rgb> image_colors(const Article& article, Rgb fallback,
                                        Diagnostics& warnings);

struct PageLayout {
  std::string template_id;
  std::optional<CropRect> crop;
  double font_size = 1.0;
  Rgb decoration_color;
  bool text_only = false;
};

using LayoutMap = std::map<PageKey, PageLayout>;

// Layouts for cover and content pages (end pages have none). Sets each
// page's template_id.
LayoutMap layout_pages(StorySet& stories, const Article& article, TemplateFamily family,
                       const TemplateGallery& gallery,
                       const std::map<std::string, Rgb>& colors, Rgb fallback);

}  // namespace storyweaver
