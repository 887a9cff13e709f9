#pragma once

#include <vector>

#include "storyweaver/article.h"
#include "storyweaver/image_matcher.h"
#include "storyweaver/layout.h"
#include "storyweaver/planner.h"
#include "storyweaver/summarizer.h"

namespace storyweaver {

// Everything the pipeline derives for one article, ready to render.
struct CompiledArticle {
  Article article;
  SummaryMap summaries;
  StorySet stories;
  std::vector<Assignment> assignments;
  TemplateFamily family = TemplateFamily::short_text;
  TemplateGallery gallery;
  LayoutMap layouts;
  Diagnostics warnings;
  int max_pages = 10;
  int max_chars_per_page = 200;
};

}  // namespace storyweaver
