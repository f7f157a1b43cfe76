#pragma once

#include <optional>

#include "readorder/document.hpp"
#include "readorder/sequence.hpp"

namespace readorder {

struct ZOrderConfig {
  // Boxes whose y-center distance stays below this are one visual line.
  // nullopt: half the document's median box height.
  std::optional<double> y_threshold;

  double effective_threshold(const Document& doc) const;
};

// Ordinal i for the i-th box in OCR emission order.
ReadingSequence default_order(const Document& doc);

// Group boxes into lines by transitive closure of |y_center difference| <
// threshold; lines top to bottom by mean y, boxes left to right within a line
// (x_up, then y_up, then id).
ReadingSequence z_order(const Document& doc, const ZOrderConfig& cfg = {});

// Greedy right-then-down scan: from the current box, the nearest unvisited
// box to the right whose y-interval overlaps wins; otherwise the unvisited
// box minimizing (y_up, x_up) starts the next run.
ReadingSequence xy_order(const Document& doc);

}  // namespace readorder
