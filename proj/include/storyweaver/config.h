#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "storyweaver/layout.h"
#include "storyweaver/planner.h"
#include "storyweaver/summarizer.h"

namespace storyweaver {

enum class LogLevel { error, warning, info, debug };

LogLevel parse_log_level(std::string_view s);
std::string to_string(LogLevel level);

struct RunConfig {
  PlannerConfig planner;
  SummarizerConfig summarizer;
  std::optional<std::string> embedder_endpoint;
  std::chrono::milliseconds embedder_timeout{10000};
  std::vector<std::string> blocklist = default_blocklist();
  std::string wiki_endpoint;  // empty: flag, then environment, then default
  std::string template_gallery;  // empty: built-in gallery
  Rgb fallback_color = kDefaultFallbackColor;
  bool offline_assets = false;
  LogLevel log_level = LogLevel::warning;
  int jobs = 1;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Overlays a config document onto `cfg`. Unknown keys and wrong types throw
// ConfigError carrying the dotted key path.
void apply_config(RunConfig& cfg, const nlohmann::json& doc);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace storyweaver
