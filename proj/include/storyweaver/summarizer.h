#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storyweaver/article.h"
#include "storyweaver/provider.h"

namespace storyweaver {

struct SegmenterOptions {
  // Lower-case tokens, without the trailing period, that never end a sentence.
  std::vector<std::string> abbreviations = default_abbreviations();
  // Treat "J." style initials as abbreviations.
  bool single_letter_abbreviations = true;

  static std::vector<std::string> default_abbreviations();
};

// Rule-based splitter. A sentence ends at a run of . ! ? (plus closing quotes
// or brackets) followed by whitespace and a token that does not start with a
// lower-case letter, or by the end of the text. Periods inside tokens
// (decimals, "e.g.") and periods after listed abbreviations do not split.
// Sentences are verbatim, trimmed substrings of the input.
std::vector<std::string> segment_sentences(std::string_view text,
                                           const SegmenterOptions& options = {});

enum class SummaryOrigin { passthrough, extractive_baseline, external };

std::string to_string(SummaryOrigin origin);

struct Summary {
  SectionIndex section_index;
  std::vector<std::string> sentences;
  SummaryOrigin origin = SummaryOrigin::passthrough;

  // Sentences joined by single spaces.
  std::string text() const;
};

using SummaryMap = std::map<SectionIndex, Summary>;

struct SummarizerConfig {
  int min_words_to_summarize = 50;
  // Sentences selected after the preserved first sentence.
  int target_sentence_count = 3;
  std::optional<std::string> external_endpoint;
  std::chrono::milliseconds timeout{10000};
  int max_in_flight = 4;
  SegmenterOptions segmenter;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Content-term counts over a document; normalized frequency is count / max.
class TermFrequencyTable {
 public:
  TermFrequencyTable() = default;
  explicit TermFrequencyTable(const std::vector<std::string>& sentences);

  void add(std::string_view text);
  double normalized(const std::string& term) const;
  std::size_t count(const std::string& term) const;

 private:
  std::map<std::string, std::size_t, std::less<>> counts_;
  std::size_t max_count_ = 0;
};

// Score = sum of normalized frequencies of the sentence's content-term
// occurrences divided by its total term count (stopwords included).
std::vector<double> score_sentences_baseline(const std::vector<std::string>& sentences,
                                             const TermFrequencyTable& doc_term_freqs);

// Indices of the `k` highest-scoring entries (earlier index wins ties),
// returned in ascending order.
std::vector<std::size_t> select_top(const std::vector<double>& scores, std::size_t k);

// Client for the external summarizer contract:
// request {"text", "max_sentences"} -> reply {"sentences": [...]}.
class ExternalSummarizer {
 public:
  explicit ExternalSummarizer(std::unique_ptr<JsonTransport> transport)
      : transport_(std::move(transport)) {}

  std::vector<std::string> summarize(const std::string& text, int max_sentences);

 private:
  std::unique_ptr<JsonTransport> transport_;
};

// Summaries keep the section's first sentence verbatim. Sections under
// cfg.min_words_to_summarize words pass through whole; otherwise the
// remaining sentences go to `external` (when given) or the extractive
// baseline. Off-contract external replies fall back to the baseline with a
// warning.
Summary summarize_section(const Section& section, const SummarizerConfig& cfg,
                          Diagnostics& warnings, ExternalSummarizer* external = nullptr);

// One Summary per text-bearing section, root included. With an external
// provider, up to cfg.max_in_flight sections are summarized concurrently.
SummaryMap summarize_article(const Article& article, const SummarizerConfig& cfg,
                             Diagnostics& warnings,
                             ExternalSummarizer* external = nullptr);

}  // namespace storyweaver
