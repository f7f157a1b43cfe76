#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "readorder/comparator.hpp"
#include "readorder/document.hpp"
#include "readorder/orderers.hpp"
#include "readorder/sequence.hpp"

namespace readorder {

struct PreorderOptions {
  bool cache = false;       // reuse the first score per ordered (left,right) pair
  bool early_exit = false;  // stop after a pass with zero swaps
  bool merge_sort = false;  // comparator-driven merge sort instead of the
                            // adjacent-swap passes; for large documents
};

struct PreorderTrace {
  long comparator_calls = 0;  // actual comparator invocations (cache misses)
  long swaps = 0;
  std::vector<std::vector<int>> pass_swaps;  // swap positions per pass
};

// Raised when the comparator fails mid-run; carries the trace so far.
class ComparatorFailure : public std::runtime_error {
 public:
  ComparatorFailure(const std::string& message, PreorderTrace trace)
      : std::runtime_error(message), trace_(std::move(trace)) {}
  const PreorderTrace& trace() const { return trace_; }

 private:
  PreorderTrace trace_;
};

struct PreorderResult {
  std::vector<std::string> arrangement;  // final box id order
  ReadingSequence sequence;
  PreorderTrace trace;
};

// Adjacent-swap rearrangement of input_order: for each pass, compare
// neighbors and swap when p < 0.5 (p == 0.5 keeps the current order).
// input_order must be a permutation of the document's box ids; the result is
// always a full permutation regardless of comparator behavior.
PreorderResult preorder(const Document& doc, const std::vector<std::string>& input_order,
                        PairwiseComparator& comparator, const PreorderOptions& options = {});

struct StrategyConfig {
  ZOrderConfig z;
  std::optional<ComparatorModel> model;        // for strategy "model"
  std::vector<std::string> external_command;   // for strategy "external-model"
  std::string external_regime = "image";
  double external_timeout_seconds = 10.0;
  PreorderOptions preorder;
};

// Dispatch over {default-ocr, z-order, xy-order, model, external-model}.
// Model strategies start from the OCR emission order. Throws
// std::invalid_argument for unknown names or missing model artifacts.
ReadingSequence order_with_strategy(const Document& doc, const std::string& strategy,
                                    const StrategyConfig& cfg = {});

std::vector<std::string> known_strategies();

}  // namespace readorder
