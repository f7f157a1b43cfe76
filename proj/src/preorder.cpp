#include "readorder/preorder.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include "readorder/external.hpp"

namespace readorder {

namespace {

class ScoreSource {
 public:
  ScoreSource(const Document& doc, PairwiseComparator& comparator, bool cache)
      : doc_(doc), comparator_(comparator), cache_enabled_(cache) {}

  double get(int left, int right, PreorderTrace& trace) {
    if (cache_enabled_) {
      auto it = cache_.find({left, right});
      if (it != cache_.end()) return it->second;
    }
    double p = comparator_.score(doc_.boxes[left], doc_.boxes[right]).p;
    ++trace.comparator_calls;
    if (cache_enabled_) {
      cache_[{left, right}] = p;
      // Reverse completion is only sound when the comparator guarantees
      // score(a,b) + score(b,a) == 1.
      if (comparator_.antisymmetric()) cache_[{right, left}] = 1.0 - p;
    }
    return p;
  }

 private:
  const Document& doc_;
  PairwiseComparator& comparator_;
  bool cache_enabled_;
  std::map<std::pair<int, int>, double> cache_;
};

std::vector<int> merge_sort_indices(std::vector<int> items, ScoreSource& scores,
                                    PreorderTrace& trace) {
  if (items.size() <= 1) return items;
  std::size_t mid = items.size() / 2;
  std::vector<int> left(items.begin(), items.begin() + mid);
  std::vector<int> right(items.begin() + mid, items.end());
  left = merge_sort_indices(std::move(left), scores, trace);
  right = merge_sort_indices(std::move(right), scores, trace);

  std::vector<int> merged;
  merged.reserve(items.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < left.size() && j < right.size()) {
    // p >= 0.5 keeps the left-run element first (stability under indifference).
    if (scores.get(left[i], right[j], trace) >= 0.5) {
      merged.push_back(left[i++]);
    } else {
      merged.push_back(right[j++]);
    }
  }
  merged.insert(merged.end(), left.begin() + i, left.end());
  merged.insert(merged.end(), right.begin() + j, right.end());
  return merged;
}

}  // namespace

PreorderResult preorder(const Document& doc, const std::vector<std::string>& input_order,
                        PairwiseComparator& comparator, const PreorderOptions& options) {
  // The input must be a permutation of the document's boxes.
  if (input_order.size() != doc.boxes.size()) {
    throw std::invalid_argument("input order length does not match the document");
  }
  std::vector<int> sequence;
  sequence.reserve(input_order.size());
  std::vector<bool> used(doc.boxes.size(), false);
  for (const auto& id : input_order) {
    int idx = doc.box_index(id);
    if (idx < 0 || used[idx]) {
      throw std::invalid_argument("input order is not a permutation of the document's boxes");
    }
    used[idx] = true;
    sequence.push_back(idx);
  }

  PreorderResult result;
  ScoreSource scores(doc, comparator, options.cache);
  long l = static_cast<long>(sequence.size());

  try {
    if (options.merge_sort) {
      sequence = merge_sort_indices(std::move(sequence), scores, result.trace);
    } else if (l >= 2) {
      for (long i = 0; i <= l - 2; ++i) {
        std::vector<int> pass_log;
        for (long j = 0; j <= l - i - 2; ++j) {
          double p = scores.get(sequence[j], sequence[j + 1], result.trace);
          if (p < 0.5) {
            std::swap(sequence[j], sequence[j + 1]);
            ++result.trace.swaps;
            pass_log.push_back(static_cast<int>(j));
          }
        }
        bool swapped = !pass_log.empty();
        result.trace.pass_swaps.push_back(std::move(pass_log));
        if (options.early_exit && !swapped) break;
      }
    }
  } catch (const std::runtime_error& e) {
    throw ComparatorFailure(e.what(), result.trace);
  }

  result.arrangement.reserve(sequence.size());
  for (int idx : sequence) result.arrangement.push_back(doc.boxes[idx].id);
  result.sequence = ReadingSequence::from_permutation(result.arrangement);
  return result;
}

std::vector<std::string> known_strategies() {
  return {"default-ocr", "z-order", "xy-order", "model", "external-model"};
}

ReadingSequence order_with_strategy(const Document& doc, const std::string& strategy,
                                    const StrategyConfig& cfg) {
  if (strategy == "default-ocr") return default_order(doc);
  if (strategy == "z-order") return z_order(doc, cfg.z);
  if (strategy == "xy-order") return xy_order(doc);

  if (strategy == "model" || strategy == "external-model") {
    std::vector<std::string> emission;
    emission.reserve(doc.boxes.size());
    for (const auto& box : doc.boxes) emission.push_back(box.id);

    if (strategy == "model") {
      if (!cfg.model) throw std::invalid_argument("strategy 'model' needs a trained model");
      ModelComparator comparator(*cfg.model, doc.page_width, doc.page_height);
      return preorder(doc, emission, comparator, cfg.preorder).sequence;
    }

    if (cfg.external_command.empty()) {
      throw std::invalid_argument("strategy 'external-model' needs a comparator command");
    }
    ExternalConfig ext;
    ext.command = cfg.external_command;
    ext.regime = cfg.external_regime;
    ext.timeout_seconds = cfg.external_timeout_seconds;
    ExternalComparator comparator(ext);
    comparator.bind_page(doc.page_width, doc.page_height);
    if (doc.image_path) {
      std::string path = *doc.image_path;
      comparator.set_image_ref_provider(
          [path](const BoundingBox&) -> std::optional<std::string> { return path; });
    }
    return preorder(doc, emission, comparator, cfg.preorder).sequence;
  }

  throw std::invalid_argument("unknown strategy: " + strategy);
}

}  // namespace readorder
