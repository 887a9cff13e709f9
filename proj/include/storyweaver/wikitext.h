#pragma once

#include <string>
#include <string_view>

#include "storyweaver/article.h"

namespace storyweaver {

struct WikitextOptions {
  std::string title;
  std::string source_url;  // defaults to https://<language>.wikipedia.org/wiki/<Title>
  std::string language = "en";
  std::string category;
  // Prefix joined with the file name to form ImageAsset::source_url.
  std::string image_url_prefix = "https://commons.wikimedia.org/wiki/Special:FilePath/";
  // Recorded on images, since markup carries no license information.
  std::string image_license = "unverified";
};

// Parses the supported MediaWiki subset: ==Heading== nesting, paragraphs and
// [[File:...|caption]] image links. Templates, tables, lists, references and
// comments are skipped with warnings; {{Short description|...}} fills the
// article description. Image sizes come from "WxHpx" options; images without
// both dimensions are kept unsized.
IngestResult parse_wikitext(std::string_view markup, const WikitextOptions& options);

// Inline markup to plain prose: links, bold/italic quotes, HTML tags and the
// common character entities.
std::string strip_inline_markup(std::string_view s);

}  // namespace storyweaver
