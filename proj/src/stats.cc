#include "storyweaver/stats.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "storyweaver/pipeline.h"

namespace storyweaver {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr const char* kUncategorized = "Uncategorized";
}

StatsRow& StatsRow::operator+=(const StatsRow& o) {
  articles += o.articles;
  sections += o.sections;
  images += o.images;
  main_stories += o.main_stories;
  main_pages += o.main_pages;
  section_stories += o.section_stories;
  return *this;
}

StatsRow stats_for(const CompiledArticle& c) {
  StatsRow r;
  r.category = c.article.category.empty() ? kUncategorized : c.article.category;
  r.articles = 1;
  r.sections = static_cast<int>(flatten_preorder(c.article.root).size()) - 1;
  r.images = static_cast<int>(c.article.images.size());
  for (const auto& s : c.stories.stories) {
    if (s.kind == StoryKind::main) {
      if (s.part == 1) ++r.main_stories;
      r.main_pages += static_cast<int>(s.pages.size());
    } else if (s.part == 1) {
      ++r.section_stories;
    }
  }
  return r;
}

StatsRow stats_for_manifest(const json& m) {
  StatsRow r;
  try {
    const json& a = m.at("article");
    std::string cat = a.value("category", "");
    r.category = cat.empty() ? kUncategorized : cat;
    r.articles = 1;
    r.sections = a.at("section_count").get<int>();
    r.images = a.at("image_count").get<int>();
    for (const auto& s : m.at("stories")) {
      bool first = s.at("part").get<int>() == 1;
      if (s.at("kind").get<std::string>() == "main") {
        if (first) ++r.main_stories;
        r.main_pages += s.at("page_count").get<int>();
      } else if (first) {
        ++r.section_stories;
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
  return r;
}

StatsReport aggregate(const std::vector<StatsRow>& per_article) {
  std::map<std::string, StatsRow> by_cat;
  StatsReport rep;
  for (const auto& r : per_article) {
    auto [it, _] = by_cat.try_emplace(r.category, StatsRow{r.category});
    it->second += r;
    rep.total += r;
  }
  for (auto& [_, r] : by_cat) rep.rows.push_back(r);
  return rep;
}

StatsReport corpus_stats(const fs::path& dir, const RunConfig& cfg) {
  if (!fs::is_directory(dir)) throw ValidationError(dir.string() + " is not a directory");
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir)) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  std::vector<StatsRow> rows;
  for (const auto& p : entries) {
    if (fs::is_directory(p)) {
      fs::path m = p / "manifest.json";
      if (!fs::exists(m)) continue;
      std::ifstream in(m);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ValidationError(m.string() + ": " + e.what());
      }
      rows.push_back(stats_for_manifest(doc));
    } else if (is_article_file(p)) {
      rows.push_back(stats_for(compile_article(load_article(p.string(), cfg), cfg)));
    }
  }
  return aggregate(rows);
}

std::string format_stats_table(const StatsReport& report) {
  const std::vector<std::string> headers = {"category",     "articles",        "sections",
                                            "images",       "main_stories",    "main_pages_mean",
                                            "section_stories"};
  auto cells = [](const StatsRow& r) {
    std::ostringstream mean;
    mean << std::fixed << std::setprecision(2) << r.main_pages_mean();
    return std::vector<std::string>{r.category,
                                    std::to_string(r.articles),
                                    std::to_string(r.sections),
                                    std::to_string(r.images),
                                    std::to_string(r.main_stories),
                                    mean.str(),
                                    std::to_string(r.section_stories)};
  };
  std::vector<std::vector<std::string>> table{headers};
  for (const auto& r : report.rows) table.push_back(cells(r));
  table.push_back(cells(report.total));

  std::vector<std::size_t> width(headers.size(), 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (const auto& row : table) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string pad(width[i] - row[i].size(), ' ');
      if (i == 0) {
        line += row[i] + pad;
      } else {
        line += "  " + pad + row[i];
      }
    }
    out << line << "\n";
  }
  return out.str();
}

json stats_to_json(const StatsReport& report) {
  auto row = [](const StatsRow& r) {
    return json{{"category", r.category},
                {"articles", r.articles},
                {"sections", r.sections},
                {"images", r.images},
                {"main_stories", r.main_stories},
                {"main_pages", r.main_pages},
                {"main_pages_mean", std::round(r.main_pages_mean() * 100) / 100},
                {"section_stories", r.section_stories}};
  };
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back(row(r));
  return {{"rows", rows}, {"total", row(report.total)}};
}

}  // namespace storyweaver
