#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "readorder/document.hpp"
#include "readorder/sequence.hpp"

namespace readorder {

// Probability that the LEFT box precedes the RIGHT box in reading order.
struct PairScore {
  double p = 0.5;
};

// The atomic pairwise contract: f(left : right) -> p in [0, 1].
class PairwiseComparator {
 public:
  virtual ~PairwiseComparator() = default;
  virtual PairScore score(const BoundingBox& left, const BoundingBox& right) = 0;
  // True when score(a,b).p + score(b,a).p == 1 is guaranteed, which allows
  // reverse-pair cache completion.
  virtual bool antisymmetric() const { return false; }
};

// Adapts a plain callable (e.g. a gold-order oracle in tests).
class FunctionComparator : public PairwiseComparator {
 public:
  using Fn = std::function<double(const BoundingBox&, const BoundingBox&)>;
  explicit FunctionComparator(Fn fn, bool antisymmetric = false)
      : fn_(std::move(fn)), antisymmetric_(antisymmetric) {}
  PairScore score(const BoundingBox& left, const BoundingBox& right) override {
    return PairScore{fn_(left, right)};
  }
  bool antisymmetric() const override { return antisymmetric_; }

 private:
  Fn fn_;
  bool antisymmetric_;
};

enum class FeatureRegime { kBox, kText, kTextBox };

std::string to_string(FeatureRegime regime);
FeatureRegime regime_from_string(const std::string& name);

struct FeatureConfig {
  int hash_width = 256;  // buckets for hashed character n-gram counts
};

int feature_dimension(FeatureRegime regime, const FeatureConfig& cfg);

// Feature vector for an ordered pair. Geometry block: normalized centroids of
// both boxes, dx, dy, widths and heights (all in [-1, 1]). Text block per
// box: hashed 1..3-gram counts (FNV-1a 64, folded modulo hash_width, scaled
// to [0,1)) plus token-count and digit-fraction scalars. Swapping the
// arguments negates dx and dy and exchanges the per-box blocks.
std::vector<double> pair_features(const BoundingBox& left, const BoundingBox& right,
                                  double page_width, double page_height,
                                  FeatureRegime regime, const FeatureConfig& cfg);

struct ComparatorModel {
  FeatureRegime regime = FeatureRegime::kBox;
  FeatureConfig features;
  std::vector<double> weights;
  double bias = 0.0;
  // training metadata
  int epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  double holdout_accuracy = 0.0;
};

// p = logistic(w . features(left,right) + bias), evaluated once in a
// canonical orientation so that score(a,b).p + score(b,a).p == 1 exactly and
// score(a,a).p == 0.5. Throws std::invalid_argument on a dimensionality
// mismatch between model and regime.
PairScore score(const ComparatorModel& model, const BoundingBox& left,
                const BoundingBox& right, double page_width, double page_height);

// Binds a trained model and page dimensions to the comparator contract.
class ModelComparator : public PairwiseComparator {
 public:
  ModelComparator(ComparatorModel model, double page_width, double page_height)
      : model_(std::move(model)), page_width_(page_width), page_height_(page_height) {}
  PairScore score(const BoundingBox& left, const BoundingBox& right) override {
    return readorder::score(model_, left, right, page_width_, page_height_);
  }
  bool antisymmetric() const override { return true; }
  const ComparatorModel& model() const { return model_; }

 private:
  ComparatorModel model_;
  double page_width_;
  double page_height_;
};

struct LabeledPair {
  int left;   // index into doc.boxes
  int right;  // index into doc.boxes
  int label;  // 1 when left precedes right in gold
};

// All ordered pairs of gold-ordered boxes, both directions; label = 1 iff
// r[left] < r[right]. Boxes at kMissing are excluded. `window` restricts to
// pairs within that ordinal distance. Throws std::invalid_argument when gold
// orders fewer than 2 boxes.
std::vector<LabeledPair> make_pairs(const Document& doc, const ReadingSequence& gold,
                                    std::optional<int> window = std::nullopt);

struct LabeledDocument {
  Document doc;
  ReadingSequence gold;
};

struct TrainConfig {
  FeatureRegime regime = FeatureRegime::kBox;
  FeatureConfig features;
  int epochs = 30;
  double learning_rate = 0.5;
  std::uint64_t seed = 1;
  double holdout_fraction = 0.2;
  std::optional<int> pair_window;
  bool full_batch = false;  // gradient over all training pairs per epoch
  double l2 = 0.0;
};

struct TrainReport {
  ComparatorModel model;
  std::vector<double> epoch_loss;  // mean training loss after each epoch
  double holdout_accuracy = 0.0;
  std::size_t train_pairs = 0;
  std::size_t holdout_pairs = 0;
};

struct TrainingInstance {
  std::vector<double> features;
  int label = 0;
};

double logistic(double z);

// Mean logistic loss over a batch plus L2 penalty; writes the gradient wrt
// weights and bias. Shared by the trainer and finite-difference checks.
double loss_and_gradient(std::span<const TrainingInstance> batch,
                         std::span<const double> weights, double bias, double l2,
                         std::vector<double>* grad_weights, double* grad_bias);

// Deterministic SGD over make_pairs output. Throws std::invalid_argument on
// an empty corpus or when no document yields any pair.
TrainReport train(const std::vector<LabeledDocument>& corpus, const TrainConfig& cfg);

std::string model_to_json(const ComparatorModel& model);
ComparatorModel model_from_json(const std::string& text);
void save_model(const std::string& path, const ComparatorModel& model);
ComparatorModel load_model(const std::string& path);

}  // namespace readorder
