#pragma once

#include <optional>
#include <string>
#include <vector>

#include "storyweaver/article.h"
#include "storyweaver/summarizer.h"

namespace storyweaver {

struct PlannerConfig {
  // Maximum pages per Story, cover and end page included.
  int max_pages = 10;
  int max_chars_per_page = 200;
  int max_sentences_per_page = 2;

  int max_content_pages() const { return max_pages - 2; }
  void validate() const;
};

enum class PlanMode { compact, multi_path };
enum class PageKind { cover, content, end };
enum class StoryKind { main, section };
enum class PageStrategy { compact, split, merge };

std::string to_string(PlanMode mode);
std::string to_string(PageKind kind);
std::string to_string(StoryKind kind);
std::string to_string(PageStrategy strategy);

struct Page {
  PageKind kind = PageKind::content;
  std::string heading;
  std::string snippet;
  // Whole summary sentences forming the snippet (content pages).
  std::vector<std::string> sentences;
  SectionIndex section_index;
  std::optional<SummaryOrigin> origin;
  // Snippet cut at a sentence boundary to fit the page.
  bool truncated = false;
  // A single sentence longer than the page limit.
  bool overflow = false;
  // A MERGE page previewing a child that also has its own Story.
  bool preview = false;
  // Stand-in page built from the article description when the overview is empty.
  bool description_page = false;
  // Story this page introduces, for MERGE pages (drives end-page links).
  std::optional<std::string> links_to;
  std::optional<std::string> image_ref;
  std::optional<std::string> template_id;
  std::string source_anchor;
  std::vector<std::string> nav_targets;  // end pages only
};

struct Story {
  std::string id;
  StoryKind kind = StoryKind::section;
  SectionIndex section_index;
  std::string title;
  int part = 1;
  PageStrategy strategy = PageStrategy::split;
  std::vector<Page> pages;
  std::vector<std::string> outgoing_links;

  std::size_t content_page_count() const { return pages.size() - 2; }
};

// Where a text-bearing section's summary is presented in full.
struct SectionRecord {
  SectionIndex section_index;
  std::string story_id;
  int page_ordinal = 0;
  int page_count = 0;
  SummaryOrigin origin = SummaryOrigin::passthrough;
  bool truncated = false;
  bool overflow = false;
};

struct StorySet {
  PlanMode mode = PlanMode::compact;
  std::vector<Story> stories;
  std::string entry;
  // Pre-order over text-bearing sections, one record each.
  std::vector<SectionRecord> sections;

  const Story* find(const std::string& id) const;
  Story* find(const std::string& id);
};

// Compact iff s <= n - 2.
PlanMode decide_mode(std::size_t content_sections, const PlannerConfig& cfg);

// Greedy fill in sentence order: a page takes whole sentences while it stays
// within both the sentence and character limits; a lone oversized sentence
// gets its own page, flagged as overflow.
std::vector<Page> split_pages(const Summary& summary, const PlannerConfig& cfg);

// One page for one summary: leading whole sentences up to the character
// limit, flagged truncated when sentences were dropped.
Page merge_page(const Summary& summary, const PlannerConfig& cfg);

// One page per child summary, in the given order.
std::vector<Page> merge_pages(const std::vector<const Summary*>& children,
                              const PlannerConfig& cfg);

// Builds the Story graph. Content beyond n - 2 pages continues in chained
// "Part k" Stories linked end page to cover. Throws PlanningError when a
// text-bearing section has no summary.
StorySet plan(const Article& article, const SummaryMap& summaries,
              const PlannerConfig& cfg);

std::string story_id_for(const SectionIndex& index);

}  // namespace storyweaver
