#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "storyweaver/compiled.h"
#include "storyweaver/config.h"

namespace storyweaver {

// Corpus composition per category, in the shape of the input/output table:
// articles, retained sections, images, main stories, mean main-story pages
// and section stories (first parts only).
struct StatsRow {
  std::string category;
  int articles = 0;
  int sections = 0;
  int images = 0;
  int main_stories = 0;
  int main_pages = 0;  // summed over main stories, all parts
  int section_stories = 0;

  double main_pages_mean() const {
    return main_stories == 0 ? 0.0 : static_cast<double>(main_pages) / main_stories;
  }
  StatsRow& operator+=(const StatsRow& o);
};

struct StatsReport {
  std::vector<StatsRow> rows;  // sorted by category
  StatsRow total{"TOTAL"};
};

StatsRow stats_for(const CompiledArticle& compiled);
// From a bundle's manifest.json document.
StatsRow stats_for_manifest(const nlohmann::json& manifest);

// Aggregates every article file and every bundle directory (one holding a
// manifest.json) directly inside `dir`, in name order. Articles without a
// category count as "Uncategorized".
StatsReport corpus_stats(const std::filesystem::path& dir, const RunConfig& cfg);

StatsReport aggregate(const std::vector<StatsRow>& per_article);

std::string format_stats_table(const StatsReport& report);
nlohmann::json stats_to_json(const StatsReport& report);

}  // namespace storyweaver
