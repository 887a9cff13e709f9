#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "storyweaver/compiled.h"
#include "storyweaver/config.h"
#include "storyweaver/renderer.h"

namespace storyweaver {

// A failure attributed to one pipeline stage. exit_code follows the CLI
// convention: 2 for bad input, 3 for environment or provider trouble.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, std::string section_index, const std::string& message,
             int exit_code)
      : std::runtime_error(stage + (section_index.empty() ? "" : " [section " + section_index + "]") +
                           ": " + message),
        stage_(std::move(stage)),
        section_index_(std::move(section_index)),
        exit_code_(exit_code) {}

  const std::string& stage() const { return stage_; }
  const std::string& section_index() const { return section_index_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  std::string section_index_;
  int exit_code_;
};

// "wiki:Title" fetches from the wiki endpoint; *.wiki / *.wikitext files are
// parsed as markup; anything else as a canonical JSON article.
IngestResult load_article(const std::string& input, const RunConfig& cfg);

// Filter, summarize, plan, match and lay out. Stage failures surface as
// StageError.
CompiledArticle compile_article(IngestResult ingest, const RunConfig& cfg);

// Loads the configured gallery (or the built-in one).
TemplateGallery gallery_for(const RunConfig& cfg);

// load_article + compile_article + render_bundle.
CompiledArticle build_article(const std::string& input, const std::filesystem::path& out_dir,
                              const RunConfig& cfg);

// Output directory name for a corpus member: the input file stem.
std::string bundle_name_for(const std::filesystem::path& input);

bool is_article_file(const std::filesystem::path& p);

}  // namespace storyweaver
