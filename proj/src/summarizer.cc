#include "storyweaver/summarizer.h"

#include <algorithm>
#include <cctype>
#include <future>
#include <numeric>
#include <semaphore>
#include <set>

#include "storyweaver/text.h"

namespace storyweaver {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

bool starts_with_closing_quote(std::string_view s) {
  // ’ and ” in UTF-8.
  return s.starts_with("\xE2\x80\x99") || s.starts_with("\xE2\x80\x9D");
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Token immediately before position `dot`, minus leading brackets/quotes.
std::string_view token_before(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(text[b - 1])) --b;
  std::string_view tok = text.substr(b, dot - b);
  while (!tok.empty() && (tok.front() == '(' || tok.front() == '"' ||
                          tok.front() == '\'' || tok.front() == '[')) {
    tok.remove_prefix(1);
  }
  return tok;
}

}  // namespace

std::vector<std::string> SegmenterOptions::default_abbreviations() {
  return {"al",  "approx", "ca",   "capt", "cf",  "co",   "col", "dr",  "e.g",
          "fig", "gen",    "i.e",  "inc",  "jr",  "lt",   "ltd", "mr",  "mrs",
          "ms",  "mt",     "no",   "prof", "sp",  "spp",  "sr",  "st",  "var",
          "vol", "vs"};
}

std::vector<std::string> segment_sentences(std::string_view text,
                                           const SegmenterOptions& options) {
  std::set<std::string, std::less<>> abbrev(options.abbreviations.begin(),
                                            options.abbreviations.end());
  std::vector<std::string> out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_terminal(text[j])) ++j;
    for (;;) {
      if (j < text.size() && is_closer(text[j])) {
        ++j;
      } else if (starts_with_closing_quote(text.substr(j))) {
        j += 3;
      } else {
        break;
      }
    }
    bool boundary = false;
    if (j >= text.size()) {
      boundary = true;
    } else if (is_space(text[j])) {
      std::size_t k = j;
      while (k < text.size() && is_space(text[k])) ++k;
      boundary = k >= text.size() ||
                 !std::islower(static_cast<unsigned char>(text[k]));
      if (boundary && text[i] == '.' && j == i + 1) {
        std::string_view tok = token_before(text, i);
        std::string key = lower(tok);
        if (abbrev.contains(key)) {
          boundary = false;
        } else if (options.single_letter_abbreviations && tok.size() == 1 &&
                   std::isalpha(static_cast<unsigned char>(tok[0]))) {
          boundary = false;
        }
      }
    }
    if (boundary) {
      std::string s = text::trim(text.substr(start, j - start));
      if (!s.empty()) out.push_back(std::move(s));
      start = j;
    }
    i = j;
  }
  std::string tail = text::trim(text.substr(start));
  if (!tail.empty()) out.push_back(std::move(tail));
  return out;
}

std::string to_string(SummaryOrigin origin) {
  switch (origin) {
    case SummaryOrigin::passthrough: return "passthrough";
    case SummaryOrigin::extractive_baseline: return "extractive_baseline";
    case SummaryOrigin::external: return "external";
  }
  return "unknown";
}

std::string Summary::text() const { return text::join(sentences, " "); }

void SummarizerConfig::validate() const {
  if (min_words_to_summarize < 1) {
    throw ConfigError("min_words_to_summarize must be >= 1");
  }
  if (target_sentence_count < 1) {
    throw ConfigError("target_sentence_count must be >= 1");
  }
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (timeout.count() <= 0) throw ConfigError("summarizer timeout must be positive");
}

TermFrequencyTable::TermFrequencyTable(const std::vector<std::string>& sentences) {
  for (const auto& s : sentences) add(s);
}

void TermFrequencyTable::add(std::string_view text) {
  for (auto& t : text::content_terms(text)) {
    max_count_ = std::max(max_count_, ++counts_[t]);
  }
}

std::size_t TermFrequencyTable::count(const std::string& term) const {
  auto it = counts_.find(term);
  return it == counts_.end() ? 0 : it->second;
}

double TermFrequencyTable::normalized(const std::string& term) const {
  if (max_count_ == 0) return 0.0;
  return static_cast<double>(count(term)) / static_cast<double>(max_count_);
}

std::vector<double> score_sentences_baseline(const std::vector<std::string>& sentences,
                                             const TermFrequencyTable& doc_term_freqs) {
  std::vector<double> scores;
  scores.reserve(sentences.size());
  for (const auto& s : sentences) {
    auto all = text::terms(s);
    if (all.empty()) {
      scores.push_back(0.0);
      continue;
    }
    double sum = 0.0;
    for (const auto& t : all) {
      if (!text::is_stopword(t)) sum += doc_term_freqs.normalized(t);
    }
    scores.push_back(sum / static_cast<double>(all.size()));
  }
  return scores;
}

std::vector<std::size_t> select_top(const std::vector<double>& scores, std::size_t k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::string> ExternalSummarizer::summarize(const std::string& text,
                                                       int max_sentences) {
  nlohmann::json reply =
      transport_->call({{"text", text}, {"max_sentences", max_sentences}});
  if (!reply.is_object() || !reply.contains("sentences") ||
      !reply["sentences"].is_array()) {
    throw ProviderError("summarizer reply lacks a sentences array");
  }
  std::vector<std::string> out;
  for (const auto& s : reply["sentences"]) {
    if (!s.is_string()) throw ProviderError("summarizer reply has a non-string sentence");
    out.push_back(s.get<std::string>());
  }
  return out;
}

namespace {

// Maps external sentences back onto `rest`; they must be verbatim members in
// source order, at most `max` of them.
std::vector<std::size_t> align_external(const std::vector<std::string>& picked,
                                        const std::vector<std::string>& rest,
                                        std::size_t max) {
  if (picked.size() > max) {
    throw ProviderError("summarizer returned " + std::to_string(picked.size()) +
                        " sentences, limit " + std::to_string(max));
  }
  std::vector<std::size_t> out;
  std::size_t next = 0;
  for (const auto& p : picked) {
    std::string want = text::trim(p);
    auto it = std::find(rest.begin() + static_cast<std::ptrdiff_t>(next), rest.end(), want);
    if (it == rest.end()) {
      throw ProviderError("summarizer returned a sentence not found verbatim in order");
    }
    out.push_back(static_cast<std::size_t>(it - rest.begin()));
    next = out.back() + 1;
  }
  return out;
}

}  // namespace

Summary summarize_section(const Section& section, const SummarizerConfig& cfg,
                          Diagnostics& warnings, ExternalSummarizer* external) {
  if (!section.has_text()) {
    throw std::invalid_argument("summarize_section: section " + section.index.str() +
                                " has no text");
  }
  Summary summary;
  summary.section_index = section.index;
  std::vector<std::string> sentences = segment_sentences(section.text, cfg.segmenter);
  if (text::word_count(section.text) <
      static_cast<std::size_t>(cfg.min_words_to_summarize)) {
    summary.sentences = std::move(sentences);
    summary.origin = SummaryOrigin::passthrough;
    return summary;
  }

  summary.sentences.push_back(sentences.front());
  std::vector<std::string> rest(sentences.begin() + 1, sentences.end());
  auto target = static_cast<std::size_t>(cfg.target_sentence_count);
  summary.origin = SummaryOrigin::extractive_baseline;
  if (rest.empty()) return summary;

  std::vector<std::size_t> chosen;
  bool have_external = false;
  if (external != nullptr) {
    try {
      chosen = align_external(
          external->summarize(text::join(rest, " "), cfg.target_sentence_count), rest,
          target);
      have_external = true;
      summary.origin = SummaryOrigin::external;
    } catch (const ProviderError& e) {
      warnings.push_back({"summarize", section.index.str(),
                          std::string("external summarizer failed, using baseline: ") +
                              e.what()});
    }
  }
  if (!have_external) {
    TermFrequencyTable tf(rest);
    chosen = select_top(score_sentences_baseline(rest, tf), target);
  }
  for (std::size_t k : chosen) summary.sentences.push_back(rest[k]);
  return summary;
}

SummaryMap summarize_article(const Article& article, const SummarizerConfig& cfg,
                             Diagnostics& warnings, ExternalSummarizer* external) {
  cfg.validate();
  std::vector<const Section*> sections = text_sections(article.root);
  std::vector<Summary> results(sections.size());
  std::vector<Diagnostics> local(sections.size());

  if (external == nullptr || cfg.max_in_flight == 1 || sections.size() < 2) {
    for (std::size_t i = 0; i < sections.size(); ++i) {
      results[i] = summarize_section(*sections[i], cfg, local[i], external);
    }
  } else {
    std::counting_semaphore<> slots(cfg.max_in_flight);
    std::vector<std::future<void>> tasks;
    tasks.reserve(sections.size());
    for (std::size_t i = 0; i < sections.size(); ++i) {
      slots.acquire();
      tasks.push_back(std::async(std::launch::async, [&, i] {
        try {
          results[i] = summarize_section(*sections[i], cfg, local[i], external);
        } catch (...) {
          slots.release();
          throw;
        }
        slots.release();
      }));
    }
    for (auto& t : tasks) t.get();
  }

  SummaryMap out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    for (auto& d : local[i]) warnings.push_back(std::move(d));
    out.emplace(sections[i]->index, std::move(results[i]));
  }
  return out;
}

}  // namespace storyweaver
