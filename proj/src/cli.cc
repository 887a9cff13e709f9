#include "storyweaver/cli.h"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "storyweaver/fetch.h"
#include "storyweaver/pipeline.h"
#include "storyweaver/stats.h"
#include "storyweaver/wikitext.h"

namespace storyweaver {

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::string log_level;
  std::string endpoint;
  std::optional<int> max_pages;
  std::optional<int> jobs;
  bool offline_assets = false;
  std::string template_gallery;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file");
  cmd->add_option("--log-level", f.log_level, "error, warning, info or debug");
}

RunConfig resolve_config(const CommonFlags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.log_level.empty()) cfg.log_level = parse_log_level(f.log_level);
  if (!f.endpoint.empty()) cfg.wiki_endpoint = f.endpoint;
  if (f.max_pages) cfg.planner.max_pages = *f.max_pages;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.offline_assets) cfg.offline_assets = true;
  if (!f.template_gallery.empty()) cfg.template_gallery = f.template_gallery;
  cfg.validate();
  return cfg;
}

void report_warnings(const Diagnostics& warnings, const RunConfig& cfg, const std::string& prefix,
                     std::ostream& err) {
  if (cfg.log_level < LogLevel::warning) return;
  for (const auto& w : warnings) {
    err << "warning: " << prefix << w.stage;
    if (!w.section_index.empty()) err << " [section " << w.section_index << "]";
    err << ": " << w.message << "\n";
  }
}

struct ArticleOutcome {
  int code = 0;
  std::string stdout_text;
  std::string stderr_text;
};

ArticleOutcome build_one(const std::string& input, const fs::path& out_dir, const RunConfig& cfg,
                         const std::string& prefix) {
  ArticleOutcome r;
  std::ostringstream out;
  std::ostringstream err;
  try {
    CompiledArticle c = build_article(input, out_dir, cfg);
    report_warnings(c.warnings, cfg, prefix, err);
    for (const auto& s : c.stories.stories) {
      out << prefix << s.id << " " << to_string(s.kind) << " " << s.pages.size() << "\n";
    }
    if (cfg.log_level >= LogLevel::info) {
      err << "info: " << prefix << "wrote " << out_dir.string() << " ("
          << to_string(c.stories.mode) << ", " << c.stories.stories.size() << " stories)\n";
    }
  } catch (const StageError& e) {
    err << "error: " << prefix << e.what() << "\n";
    r.code = e.exit_code();
  }
  r.stdout_text = out.str();
  r.stderr_text = err.str();
  return r;
}

int cmd_build(const std::string& input, const std::string& out_dir, const RunConfig& cfg,
              std::ostream& out, std::ostream& err) {
  if (input.rfind("wiki:", 0) != 0 && fs::is_directory(input)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(input)) {
      if (e.is_regular_file() && is_article_file(e.path())) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ArticleOutcome> results(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < files.size(); i = next++) {
        results[i] = build_one(files[i].string(), fs::path(out_dir) / bundle_name_for(files[i]),
                               cfg, bundle_name_for(files[i]) + ": ");
      }
    };
    std::vector<std::thread> pool;
    std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), files.size());
    for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    int code = 0;
    for (const auto& r : results) {
      out << r.stdout_text;
      err << r.stderr_text;
      if (code == 0) code = r.code;
    }
    return code;
  }
  ArticleOutcome r = build_one(input, out_dir, cfg, "");
  out << r.stdout_text;
  err << r.stderr_text;
  return r.code;
}

int cmd_fetch(const std::string& input, const std::string& out_path, const RunConfig& cfg,
              std::ostream& out, std::ostream& err) {
  std::string title = input.rfind("wiki:", 0) == 0 ? input.substr(5) : input;
  try {
    WikiClient client(resolve_wiki_endpoint(cfg.wiki_endpoint));
    FetchedDocument doc = client.fetch_article(title);
    WikitextOptions opts;
    opts.title = doc.title;
    IngestResult r = parse_wikitext(doc.wikitext, opts);
    report_warnings(r.warnings, cfg, "", err);
    std::string json = emit_canonical(filter_sections(r.article, cfg.blocklist));
    if (out_path.empty() || out_path == "-") {
      out << json;
    } else {
      std::ofstream f(out_path, std::ios::binary);
      f << json;
      if (!f) {
        err << "error: cannot write " << out_path << "\n";
        return 3;
      }
    }
    return 0;
  } catch (const FetchError& e) {
    err << "error: fetch: " << e.what() << "\n";
    return e.kind() == FetchErrorKind::not_found ? 2 : 3;
  } catch (const ParseError& e) {
    err << "error: ingest: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: ingest: " << e.what() << "\n";
    return 2;
  }
}

int cmd_validate(const std::string& bundle, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(bundle)) {
    err << "error: bundle directory " << bundle << " does not exist\n";
    return 2;
  }
  auto violations = validate_bundle(bundle);
  for (const auto& v : violations) out << to_string(v) << "\n";
  if (violations.empty()) {
    out << "ok: " << bundle << "\n";
    return 0;
  }
  out << violations.size() << " violation(s)\n";
  return 1;
}

int cmd_stats(const std::string& dir, const std::string& format, const std::string& out_path,
              const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  StatsReport rep;
  try {
    rep = corpus_stats(dir, cfg);
  } catch (const StageError& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const ValidationError& e) {
    err << "error: stats: " << e.what() << "\n";
    return 2;
  }
  std::string text =
      format == "json" ? stats_to_json(rep).dump(2) + "\n" : format_stats_table(rep);
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    f << text;
    if (!f) {
      err << "error: cannot write " << out_path << "\n";
      return 3;
    }
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compile articles into linked web stories", "storyweaver"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string input;
  std::string out_dir;
  std::string format = "text";

  CLI::App* build = app.add_subcommand("build", "Build story bundles from an article or corpus");
  build->add_option("input,--input", input,
                    "article .json/.wiki file, wiki:Title, or a corpus directory")
      ->required();
  build->add_option("-o,--out", out_dir, "output bundle directory")->required();
  build->add_option("--endpoint", flags.endpoint, "MediaWiki API endpoint");
  build->add_option("--max-pages", flags.max_pages, "maximum pages per story");
  build->add_option("--jobs", flags.jobs, "articles built concurrently");
  build->add_flag("--offline-assets", flags.offline_assets, "copy local images into the bundle");
  build->add_option("--template-gallery", flags.template_gallery, "template gallery JSON file");
  add_common(build, flags);

  CLI::App* fetch = app.add_subcommand("fetch", "Fetch an article and write canonical JSON");
  fetch->add_option("input,--input", input, "article title or wiki:Title")->required();
  fetch->add_option("-o,--out", out_dir, "output file (default stdout)");
  fetch->add_option("--endpoint", flags.endpoint, "MediaWiki API endpoint");
  add_common(fetch, flags);

  CLI::App* validate = app.add_subcommand("validate", "Check a built bundle");
  validate->add_option("input,--input", input, "bundle directory")->required();
  add_common(validate, flags);

  CLI::App* stats = app.add_subcommand("stats", "Corpus composition report");
  stats->add_option("input,--input", input, "directory of articles or bundles")->required();
  stats->add_option("--format", format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  stats->add_option("-o,--out", out_dir, "output file (default stdout)");
  stats->add_option("--max-pages", flags.max_pages, "maximum pages per story");
  add_common(stats, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    cfg = resolve_config(flags);
  } catch (const ConfigError& e) {
    err << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: config: " << e.what() << "\n";
    return 2;
  }

  if (build->parsed()) return cmd_build(input, out_dir, cfg, out, err);
  if (fetch->parsed()) return cmd_fetch(input, out_dir, cfg, out, err);
  if (validate->parsed()) return cmd_validate(input, out, err);
  return cmd_stats(input, format, out_dir, cfg, out, err);
}

}  // namespace storyweaver
