#include "storyweaver/pipeline.h"

#include <fstream>
#include <sstream>

#include "storyweaver/fetch.h"
#include "storyweaver/wikitext.h"

namespace storyweaver {

namespace fs = std::filesystem;

namespace {

// Runs `fn`, re-raising failures tagged with `stage`.
template <typename Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const ParseError& e) {
    throw StageError(stage, "", e.what(), 2);
  } catch (const ValidationError& e) {
    throw StageError(stage, "", e.what(), 2);
  } catch (const ConfigError& e) {
    throw StageError(stage, "", e.what(), 2);
  } catch (const PlanningError& e) {
    throw StageError(stage, "", e.what(), 2);
  } catch (const FetchError& e) {
    throw StageError(stage, "", e.what(), e.kind() == FetchErrorKind::not_found ? 2 : 3);
  } catch (const ProviderError& e) {
    throw StageError(stage, "", e.what(), 3);
  } catch (const IoError& e) {
    throw StageError(stage, "", e.what(), 3);
  } catch (const std::exception& e) {
    throw StageError(stage, "", e.what(), 3);
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ValidationError("cannot read input " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool is_wikitext_path(const fs::path& p) {
  auto ext = p.extension();
  return ext == ".wiki" || ext == ".wikitext";
}

}  // namespace

bool is_article_file(const fs::path& p) {
  return p.extension() == ".json" || is_wikitext_path(p);
}

std::string bundle_name_for(const fs::path& input) { return input.stem().string(); }

IngestResult load_article(const std::string& input, const RunConfig& cfg) {
  return staged("ingest", [&] {
    if (input.rfind("wiki:", 0) == 0) {
      std::string title = input.substr(5);
      if (title.empty()) throw ValidationError("empty article title in '" + input + "'");
      WikiClient client(resolve_wiki_endpoint(cfg.wiki_endpoint));
      FetchedDocument doc = client.fetch_article(title);
      WikitextOptions opts;
      opts.title = doc.title;
      return parse_wikitext(doc.wikitext, opts);
    }
    fs::path p(input);
    if (!fs::exists(p)) throw ValidationError("input " + input + " does not exist");
    if (is_wikitext_path(p)) {
      WikitextOptions opts;
      opts.title = p.stem().string();
      for (char& c : opts.title) {
        if (c == '_') c = ' ';
      }
      return parse_wikitext(read_file(p), opts);
    }
    return parse_article_file(p);
  });
}

TemplateGallery gallery_for(const RunConfig& cfg) {
  if (cfg.template_gallery.empty()) return TemplateGallery::builtin();
  return TemplateGallery::load(cfg.template_gallery);
}

CompiledArticle compile_article(IngestResult ingest, const RunConfig& cfg) {
  staged("config", [&] { cfg.validate(); });
  CompiledArticle c;
  c.max_pages = cfg.planner.max_pages;
  c.max_chars_per_page = cfg.planner.max_chars_per_page;
  c.warnings = std::move(ingest.warnings);
  c.article = staged("ingest", [&] {
    Article a = filter_sections(ingest.article, cfg.blocklist);
    validate_article(a);
    return a;
  });

  c.summaries = staged("summarize", [&] {
    std::unique_ptr<ExternalSummarizer> external;
    if (cfg.summarizer.external_endpoint) {
      external = std::make_unique<ExternalSummarizer>(
          make_transport(*cfg.summarizer.external_endpoint, cfg.summarizer.timeout));
    }
    return summarize_article(c.article, cfg.summarizer, c.warnings, external.get());
  });

  c.stories = staged("plan", [&] { return plan(c.article, c.summaries, cfg.planner); });

  c.assignments = staged("match", [&] {
    ArticleFeatures features;
    bool done = false;
    if (cfg.embedder_endpoint) {
      try {
        ExternalEmbedder embedder(make_transport(*cfg.embedder_endpoint, cfg.embedder_timeout));
        features = compute_features(c.stories, c.article, c.summaries, &embedder);
        done = true;
      } catch (const ProviderError& e) {
        c.warnings.push_back({"match", "",
                              std::string("external embedder failed (") + e.what() +
                                  "); using textual features"});
      }
    }
    if (!done) features = compute_features(c.stories, c.article, c.summaries);
    auto a = assign_images(c.stories, c.article, features, c.warnings);
    apply_assignments(c.stories, a);
    return a;
  });

  staged("layout", [&] {
    c.gallery = gallery_for(cfg);
    c.family = choose_family(c.summaries);
    auto colors = image_colors(c.article, cfg.fallback_color, c.warnings);
    c.layouts = layout_pages(c.stories, c.article, c.family, c.gallery, colors,
                             cfg.fallback_color);
  });
  return c;
}

CompiledArticle build_article(const std::string& input, const fs::path& out_dir,
                              const RunConfig& cfg) {
  CompiledArticle c = compile_article(load_article(input, cfg), cfg);
  RenderOptions opts;
  opts.offline_assets = cfg.offline_assets;
  staged("render", [&] { render_bundle(c, out_dir, opts); });
  return c;
}

}  // namespace storyweaver
