#include "storyweaver/text.h"

#include <algorithm>
#include <array>
#include <cctype>

namespace storyweaver::text {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_term_char(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

// Sorted for binary search.
constexpr std::array<std::string_view, 127> kStopwords = {
    "a",       "about",  "above",   "after",  "again",   "against", "all",
    "also",    "am",     "an",      "and",    "any",     "are",     "as",
    "at",      "be",     "because", "been",   "before",  "being",   "below",
    "between", "both",   "but",     "by",     "can",     "could",   "did",
    "do",      "does",   "doing",   "down",   "during",  "each",    "few",
    "for",     "from",   "further", "had",    "has",     "have",    "having",
    "he",      "her",    "here",    "hers",   "herself", "him",     "himself",
    "his",     "how",    "i",       "if",     "in",      "into",    "is",
    "it",      "its",    "itself",  "just",   "may",     "me",      "might",
    "more",    "most",   "much",    "must",   "my",      "myself",  "no",
    "nor",     "not",    "now",     "of",     "off",     "often",   "on",
    "once",    "one",    "only",    "or",     "other",   "our",     "ours",
    "out",     "over",   "own",     "same",   "she",     "should",  "so",
    "some",    "such",   "than",    "that",   "the",     "their",   "theirs",
    "them",    "then",   "there",   "these",  "they",    "this",    "those",
    "through", "to",     "too",     "under",  "until",   "up",      "very",
    "was",     "we",     "were",    "what",   "when",    "where",   "which",
    "while",   "who",    "whom",    "why",    "will",    "with",    "would",
    "you",
};

}  // namespace

std::size_t char_count(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

std::size_t word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_space(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(c);
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::vector<std::string> terms(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (is_term_char(c)) {
      cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool is_stopword(std::string_view lowered_term) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(),
                            lowered_term);
}

std::vector<std::string> content_terms(std::string_view s) {
  std::vector<std::string> out = terms(s);
  std::erase_if(out, [](const std::string& t) { return is_stopword(t); });
  return out;
}

std::vector<std::string> filename_terms(std::string_view filename) {
  auto slash = filename.find_last_of('/');
  if (slash != std::string_view::npos) filename.remove_prefix(slash + 1);
  auto colon = filename.find(':');
  if (colon != std::string_view::npos) filename.remove_prefix(colon + 1);
  auto dot = filename.find_last_of('.');
  if (dot != std::string_view::npos && dot > 0) filename = filename.substr(0, dot);
  return content_terms(filename);
}

std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string anchor_fragment(std::string_view title) {
  std::string out = normalize_space(title);
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

std::string slugify(std::string_view s) {
  std::string out;
  bool dash = false;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (dash && !out.empty()) out.push_back('-');
      dash = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      dash = true;
    }
  }
  return out.empty() ? std::string("untitled") : out;
}

}  // namespace storyweaver::text
