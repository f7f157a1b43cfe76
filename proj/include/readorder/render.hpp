#pragma once

#include <string>

#include "readorder/document.hpp"
#include "readorder/sequence.hpp"

namespace readorder {

struct RenderStyle {
  std::string box_color = "#1f77b4";
  std::string missing_color = "#999999";
  std::string label_color = "#d62728";  // ordinal numbers, 1-based
  std::string arrow_color = "#d62728";
  double stroke_width = 1.5;
  double font_size = 14.0;
  bool arrows = true;
};

// SVG 1.1 overlay: one outlined rect per box, its 1-based ordinal label at
// the centroid, and centroid-to-centroid arrows in ordinal order. Missing
// boxes are dashed and unlabeled. The page frame is drawn separately.
std::string render_svg(const Document& doc, const ReadingSequence& seq,
                       const RenderStyle& style = {});

}  // namespace readorder
