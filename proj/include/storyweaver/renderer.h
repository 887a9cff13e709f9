#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "storyweaver/compiled.h"

namespace storyweaver {

struct RenderOptions {
  // Copy local image files into assets/ and reference them relatively.
  bool offline_assets = false;
  std::string publisher = "Storyweaver";
  std::string publisher_logo =
      "https://upload.wikimedia.org/wikipedia/commons/8/80/Wikipedia-logo-v2.svg";
};

// One AMP story document. Pages whose image id does not resolve are rendered
// text-only and reported in `warnings`.
std::string render_story(const Story& story, const CompiledArticle& compiled,
                         const RenderOptions& options, Diagnostics& warnings);

// Review manifest: stories, one row per text-bearing section, one row per
// page, warnings.
nlohmann::json build_manifest(const CompiledArticle& compiled);

nlohmann::json build_assets(const CompiledArticle& compiled, const RenderOptions& options);

std::string render_index(const CompiledArticle& compiled);

// Writes index.html, <story>.html per story, manifest.json and assets.json into
// a staging directory next to `out_dir`, then swaps it into place. Throws
// IoError before touching `out_dir` when staging fails. Render warnings are
// appended to compiled.warnings first.
void render_bundle(CompiledArticle& compiled, const std::filesystem::path& out_dir,
                   const RenderOptions& options = {});

struct Violation {
  std::string document;
  std::string kind;  // markup, structure, length, snippet, image, link, manifest, bijection
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::string to_string(const Violation& v);

struct StoryCheckLimits {
  int min_pages = 3;
  int max_pages = 10;
  int max_snippet_chars = 200;
};

std::vector<Violation> validate_story_html(std::string_view document,
                                           const StoryCheckLimits& limits = {},
                                           const std::string& name = "story");

// Manifest present and well-formed, every story document valid, every
// relative link resolving inside the bundle, and section rows matching the
// article's text-bearing sections one-to-one.
std::vector<Violation> validate_bundle(const std::filesystem::path& bundle_dir);

}  // namespace storyweaver
