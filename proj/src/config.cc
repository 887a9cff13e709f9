#include "storyweaver/config.h"

#include <fstream>

namespace storyweaver {

using nlohmann::json;

LogLevel parse_log_level(std::string_view s) {
  if (s == "error") return LogLevel::error;
  if (s == "warning" || s == "warn") return LogLevel::warning;
  if (s == "info") return LogLevel::info;
  if (s == "debug") return LogLevel::debug;
  throw ConfigError("unknown log level '" + std::string(s) + "'");
}

std::string to_string(LogLevel level) {
  switch (level) {
    case LogLevel::error: return "error";
    case LogLevel::warning: return "warning";
    case LogLevel::info: return "info";
    case LogLevel::debug: return "debug";
  }
  return "warning";
}

void RunConfig::validate() const {
  planner.validate();
  summarizer.validate();
  if (jobs < 1 || jobs > 64) throw ConfigError("jobs must be between 1 and 64");
  if (embedder_timeout.count() <= 0) throw ConfigError("embedder.timeout_ms must be positive");
}

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError("config key '" + where() + "' must be an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [k, _] : obj_.items()) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) throw ConfigError("unknown config key '" + key(k) + "'");
    }
  }

  template <typename T>
  void get(const char* k, T& out) const {
    if (!obj_.contains(k)) return;
    const json& v = obj_[k];
    try {
      if constexpr (std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      out = v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key(k) + "' has the wrong type");
    }
  }

  std::optional<Reader> sub(const char* k) const {
    if (!obj_.contains(k)) return std::nullopt;
    return Reader(obj_[k], key(k));
  }

  const json& raw() const { return obj_; }
  std::string key(std::string_view k) const {
    return path_.empty() ? std::string(k) : path_ + "." + std::string(k);
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& obj_;
  std::string path_;
};

}  // namespace

void apply_config(RunConfig& cfg, const json& doc) {
  Reader root(doc, "");
  root.allow({"planner", "summarizer", "embedder", "ingest", "layout", "render", "log_level",
              "jobs"});
  if (auto r = root.sub("planner")) {
    r->allow({"max_pages", "max_chars_per_page", "max_sentences_per_page"});
    r->get("max_pages", cfg.planner.max_pages);
    r->get("max_chars_per_page", cfg.planner.max_chars_per_page);
    r->get("max_sentences_per_page", cfg.planner.max_sentences_per_page);
  }
  if (auto r = root.sub("summarizer")) {
    r->allow({"min_words", "target_sentences", "endpoint", "timeout_ms", "max_in_flight",
              "abbreviations"});
    r->get("min_words", cfg.summarizer.min_words_to_summarize);
    r->get("target_sentences", cfg.summarizer.target_sentence_count);
    r->get("max_in_flight", cfg.summarizer.max_in_flight);
    std::string endpoint;
    r->get("endpoint", endpoint);
    if (!endpoint.empty()) cfg.summarizer.external_endpoint = endpoint;
    int timeout = static_cast<int>(cfg.summarizer.timeout.count());
    r->get("timeout_ms", timeout);
    cfg.summarizer.timeout = std::chrono::milliseconds(timeout);
    r->get("abbreviations", cfg.summarizer.segmenter.abbreviations);
  }
  if (auto r = root.sub("embedder")) {
    r->allow({"endpoint", "timeout_ms"});
    std::string endpoint;
    r->get("endpoint", endpoint);
    if (!endpoint.empty()) cfg.embedder_endpoint = endpoint;
    int timeout = static_cast<int>(cfg.embedder_timeout.count());
    r->get("timeout_ms", timeout);
    cfg.embedder_timeout = std::chrono::milliseconds(timeout);
  }
  if (auto r = root.sub("ingest")) {
    r->allow({"blocklist", "wiki_endpoint"});
    r->get("blocklist", cfg.blocklist);
    r->get("wiki_endpoint", cfg.wiki_endpoint);
  }
  if (auto r = root.sub("layout")) {
    r->allow({"template_gallery", "fallback_color"});
    r->get("template_gallery", cfg.template_gallery);
    std::string color;
    r->get("fallback_color", color);
    if (!color.empty()) cfg.fallback_color = Rgb::parse_hex(color);
  }
  if (auto r = root.sub("render")) {
    r->allow({"offline_assets"});
    r->get("offline_assets", cfg.offline_assets);
  }
  std::string level;
  root.get("log_level", level);
  if (!level.empty()) cfg.log_level = parse_log_level(level);
  root.get("jobs", cfg.jobs);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  RunConfig cfg;
  apply_config(cfg, doc);
  // Relative gallery paths are relative to the config file.
  if (!cfg.template_gallery.empty() &&
      std::filesystem::path(cfg.template_gallery).is_relative()) {
    cfg.template_gallery = (path.parent_path() / cfg.template_gallery).string();
  }
  return cfg;
}

}  // namespace storyweaver
