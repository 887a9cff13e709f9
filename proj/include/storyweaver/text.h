#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace storyweaver::text {

// Number of UTF-8 code points. Page and summary length limits count these.
std::size_t char_count(std::string_view s);

// Whitespace-delimited token count.
std::size_t word_count(std::string_view s);

std::string trim(std::string_view s);

// Collapses every whitespace run to a single space and trims the ends.
std::string normalize_space(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lower-cased alphanumeric runs. Non-ASCII bytes are kept inside terms so
// accented words survive as single tokens.
std::vector<std::string> terms(std::string_view s);

// Fixed English stopword list shared by sentence scoring and featurization.
bool is_stopword(std::string_view lowered_term);

// Terms minus stopwords.
std::vector<std::string> content_terms(std::string_view s);

// "Red_apple-tree.jpg" -> {"red", "apple", "tree"}; drops the extension.
std::vector<std::string> filename_terms(std::string_view filename);

std::string html_escape(std::string_view s);

// Section titles -> URL fragment ("Uses and cultivation" -> "Uses_and_cultivation").
std::string anchor_fragment(std::string_view title);

// Lower-case ASCII slug for ids and file names.
std::string slugify(std::string_view s);

}  // namespace storyweaver::text
