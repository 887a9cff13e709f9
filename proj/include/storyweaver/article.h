#pragma once

#include <compare>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storyweaver/diagnostics.h"

namespace storyweaver {

// Ordinal path of a section in the article tree. The root (overview) has an
// empty path and prints as "0"; the second child of the first top-level
// section prints as "1.2".
class SectionIndex {
 public:
  SectionIndex() = default;
  explicit SectionIndex(std::vector<int> path) : path_(std::move(path)) {}

  // Accepts "0" for the root and dotted positive ordinals otherwise.
  static SectionIndex parse(std::string_view s);

  bool is_root() const { return path_.empty(); }
  std::size_t depth() const { return path_.size(); }
  const std::vector<int>& path() const { return path_; }

  SectionIndex child(int ordinal) const;
  SectionIndex parent() const;
  bool is_ancestor_of(const SectionIndex& other) const;

  std::string str() const;

  friend auto operator<=>(const SectionIndex&, const SectionIndex&) = default;
  friend bool operator==(const SectionIndex&, const SectionIndex&) = default;

 private:
  std::vector<int> path_;
};

struct Section {
  std::string title;
  std::string text;
  int level = 0;
  SectionIndex index;
  std::vector<Section> children;
  std::vector<std::string> image_refs;

  bool has_text() const;
  bool is_leaf() const { return children.empty(); }

  friend bool operator==(const Section&, const Section&) = default;
};

struct ImageAsset {
  std::string id;
  std::string source_url;
  std::string caption;
  // Caption from an image-text dataset record, kept beside the markup
  // caption without choosing a precedence between them.
  std::string dataset_caption;
  int width = 0;
  int height = 0;
  SectionIndex section_index;
  std::string license_tag;
  // Optional local raster used for pixel analysis and offline bundles.
  std::string local_file;

  // Unsized images are carried along but never matched.
  bool has_resolution() const { return width > 0 && height > 0; }

  friend bool operator==(const ImageAsset&, const ImageAsset&) = default;
};

struct Article {
  std::string title;
  std::string description;
  std::string language = "en";
  std::string source_url;
  std::string category;
  Section root;
  std::vector<ImageAsset> images;

  const Section* find(const SectionIndex& index) const;
  const ImageAsset* find_image(std::string_view id) const;

  // Level-1 sections, i.e. the "content sections" count s.
  std::size_t content_section_count() const { return root.children.size(); }

  friend bool operator==(const Article&, const Article&) = default;
};

// Pre-order walk including the root.
void for_each_preorder(const Section& root,
                       const std::function<void(const Section&)>& fn);

// Pre-order list of every section, root first.
std::vector<const Section*> flatten_preorder(const Section& root);

// Pre-order list of sections whose text is non-empty.
std::vector<const Section*> text_sections(const Section& root);

struct IngestResult {
  Article article;
  Diagnostics warnings;
};

// Flat section list as both front-ends produce it, before tree assembly.
struct FlatSection {
  int level = 1;
  std::string title;
  std::string text;
  std::optional<std::string> declared_index;
  std::size_t line = 0;  // source position for diagnostics
};

// Builds the section tree from document-ordered headings. The first heading
// under the root must be level 1; deeper jumps are clamped to parent + 1.
// Declared indices must be unique and agree with the derived numbering.
// `flat_indices`, when given, receives the derived index of each entry.
Section assemble_tree(std::string overview, const std::vector<FlatSection>& flat,
                      Diagnostics& warnings,
                      std::vector<SectionIndex>* flat_indices = nullptr);

// Throws ValidationError on the first broken Article invariant.
void validate_article(const Article& article);

// Canonical article file (JSON, format_version 1). `base_dir` resolves
// relative `file` entries of images.
IngestResult parse_article(std::string_view document,
                           const std::filesystem::path& base_dir = {});
IngestResult parse_article_file(const std::filesystem::path& path);

// Debug serializer; parse_article(emit_canonical(a)) reproduces `a`.
std::string emit_canonical(const Article& article);

const std::vector<std::string>& default_blocklist();

// Returns a copy without blocklisted subtrees (case-insensitive title match),
// renumbered pre-order. Images owned by removed sections are dropped, and
// internal sections left with neither text nor children are pruned.
Article filter_sections(const Article& article,
                        const std::vector<std::string>& blocklist = default_blocklist());

}  // namespace storyweaver
