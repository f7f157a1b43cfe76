#include "readorder/comparator.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "readorder/rng.hpp"

#include "json.hpp"

namespace readorder {

std::string to_string(FeatureRegime regime) {
  switch (regime) {
    case FeatureRegime::kBox: return "box";
    case FeatureRegime::kText: return "text";
    case FeatureRegime::kTextBox: return "text_box";
  }
  return "box";
}

FeatureRegime regime_from_string(const std::string& name) {
  if (name == "box") return FeatureRegime::kBox;
  if (name == "text") return FeatureRegime::kText;
  if (name == "text_box") return FeatureRegime::kTextBox;
  throw std::invalid_argument("unknown feature regime: " + name);
}

namespace {

constexpr int kGeometryDim = 10;  // xL,yL,xR,yR,dx,dy,wL,hL,wR,hR

int text_block_dim(const FeatureConfig& cfg) { return cfg.hash_width + 2; }

std::uint64_t fnv1a(const char* data, std::size_t len) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

// Hashed byte 1..3-gram counts over the lowercased text, scaled to [0,1),
// followed by a bounded token count and the digit fraction.
void append_text_block(const std::string& raw, const FeatureConfig& cfg,
                       std::vector<double>& out) {
  std::string text = raw;
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

  std::vector<double> counts(cfg.hash_width, 0.0);
  long total = 0;
  for (int n = 1; n <= 3; ++n) {
    if (static_cast<int>(text.size()) < n) continue;
    for (std::size_t i = 0; i + n <= text.size(); ++i) {
      std::uint64_t h = fnv1a(text.data() + i, static_cast<std::size_t>(n));
      counts[h % static_cast<std::uint64_t>(cfg.hash_width)] += 1.0;
      ++total;
    }
  }
  double scale = 1.0 / (1.0 + static_cast<double>(total));
  for (double c : counts) out.push_back(c * scale);

  long tokens = 0;
  bool in_token = false;
  long digits = 0;
  for (unsigned char c : text) {
    bool space = std::isspace(c) != 0;
    if (!space && !in_token) ++tokens;
    in_token = !space;
    if (std::isdigit(c)) ++digits;
  }
  out.push_back(std::min(1.0, static_cast<double>(tokens) / 16.0));
  out.push_back(text.empty() ? 0.0 : static_cast<double>(digits) / static_cast<double>(text.size()));
}

}  // namespace

int feature_dimension(FeatureRegime regime, const FeatureConfig& cfg) {
  switch (regime) {
    case FeatureRegime::kBox: return kGeometryDim;
    case FeatureRegime::kText: return 2 * text_block_dim(cfg);
    case FeatureRegime::kTextBox: return kGeometryDim + 2 * text_block_dim(cfg);
  }
  return kGeometryDim;
}

std::vector<double> pair_features(const BoundingBox& left, const BoundingBox& right,
                                  double page_width, double page_height,
                                  FeatureRegime regime, const FeatureConfig& cfg) {
  if (page_width <= 0.0 || page_height <= 0.0) {
    throw std::invalid_argument("page dimensions must be positive");
  }
  std::vector<double> out;
  out.reserve(feature_dimension(regime, cfg));

  if (regime == FeatureRegime::kBox || regime == FeatureRegime::kTextBox) {
    Centroid cl = centroid(left);
    Centroid cr = centroid(right);
    double xl = cl.x / page_width;
    double yl = cl.y / page_height;
    double xr = cr.x / page_width;
    double yr = cr.y / page_height;
    out.insert(out.end(), {xl, yl, xr, yr, xr - xl, yr - yl,
                           left.width() / page_width, left.height() / page_height,
                           right.width() / page_width, right.height() / page_height});
  }
  if (regime == FeatureRegime::kText || regime == FeatureRegime::kTextBox) {
    append_text_block(left.text, cfg, out);
    append_text_block(right.text, cfg, out);
  }
  return out;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

PairScore score(const ComparatorModel& model, const BoundingBox& left,
                const BoundingBox& right, double page_width, double page_height) {
  if (static_cast<int>(model.weights.size()) != feature_dimension(model.regime, model.features)) {
    throw std::invalid_argument("model weight length does not match regime dimensionality");
  }
  // Antisymmetry fixed point.
  if (left.id == right.id) return PairScore{0.5};

  // One canonical evaluation per unordered pair; the reverse direction is
  // 1 - p, which makes score(a,b).p + score(b,a).p == 1 exact.
  bool canonical = left.id < right.id;
  const BoundingBox& first = canonical ? left : right;
  const BoundingBox& second = canonical ? right : left;
  std::vector<double> phi =
      pair_features(first, second, page_width, page_height, model.regime, model.features);
  double z = model.bias;
  for (std::size_t i = 0; i < phi.size(); ++i) z += model.weights[i] * phi[i];
  double p = logistic(z);
  return PairScore{canonical ? p : 1.0 - p};
}

std::vector<LabeledPair> make_pairs(const Document& doc, const ReadingSequence& gold,
                                    std::optional<int> window) {
  std::vector<std::pair<int, int>> ordered;  // (ordinal, box index)
  for (std::size_t i = 0; i < doc.boxes.size(); ++i) {
    auto ord = gold.ordinal(doc.boxes[i].id);
    if (ord && *ord >= 0) ordered.emplace_back(*ord, static_cast<int>(i));
  }
  if (ordered.size() < 2) {
    throw std::invalid_argument("make_pairs needs at least 2 gold-ordered boxes");
  }
  std::sort(ordered.begin(), ordered.end());

  std::vector<LabeledPair> pairs;
  for (std::size_t a = 0; a < ordered.size(); ++a) {
    for (std::size_t b = 0; b < ordered.size(); ++b) {
      if (a == b) continue;
      if (window && std::abs(ordered[a].first - ordered[b].first) > *window) continue;
      pairs.push_back({ordered[a].second, ordered[b].second,
                       ordered[a].first < ordered[b].first ? 1 : 0});
    }
  }
  return pairs;
}

double loss_and_gradient(std::span<const TrainingInstance> batch,
                         std::span<const double> weights, double bias, double l2,
                         std::vector<double>* grad_weights, double* grad_bias) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  grad_weights->assign(weights.size(), 0.0);
  *grad_bias = 0.0;
  double loss = 0.0;
  for (const auto& inst : batch) {
    if (inst.features.size() != weights.size()) {
      throw std::invalid_argument("feature length does not match weight length");
    }
    double z = bias;
    for (std::size_t i = 0; i < weights.size(); ++i) z += weights[i] * inst.features[i];
    double p = logistic(z);
    double y = static_cast<double>(inst.label);
    // Numerically stable -log p / -log(1-p): log(1 + e^{-|z|}) + max(0, -yz')
    double margin = inst.label == 1 ? z : -z;
    loss += margin >= 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
    double residual = p - y;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      (*grad_weights)[i] += residual * inst.features[i];
    }
    *grad_bias += residual;
  }
  double inv = 1.0 / static_cast<double>(batch.size());
  loss *= inv;
  *grad_bias *= inv;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    (*grad_weights)[i] = (*grad_weights)[i] * inv + l2 * weights[i];
    loss += 0.5 * l2 * weights[i] * weights[i];
  }
  return loss;
}

TrainReport train(const std::vector<LabeledDocument>& corpus, const TrainConfig& cfg) {
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");

  std::vector<TrainingInstance> instances;
  for (const auto& sample : corpus) {
    std::vector<LabeledPair> pairs;
    try {
      pairs = make_pairs(sample.doc, sample.gold, cfg.pair_window);
    } catch (const std::invalid_argument&) {
      continue;  // documents with <2 ordered boxes contribute nothing
    }
    for (const auto& pair : pairs) {
      TrainingInstance inst;
      inst.features = pair_features(sample.doc.boxes[pair.left], sample.doc.boxes[pair.right],
                                    sample.doc.page_width, sample.doc.page_height,
                                    cfg.regime, cfg.features);
      inst.label = pair.label;
      instances.push_back(std::move(inst));
    }
  }
  if (instances.empty()) {
    throw std::invalid_argument("no document in the corpus yields a training pair");
  }

  Rng rng(cfg.seed);
  rng.shuffle(instances);
  std::size_t holdout_count = cfg.holdout_fraction > 0.0
      ? static_cast<std::size_t>(std::llround(cfg.holdout_fraction * instances.size()))
      : 0;
  holdout_count = std::min(holdout_count, instances.size() > 1 ? instances.size() - 1 : 0);
  std::vector<TrainingInstance> holdout(instances.end() - holdout_count, instances.end());
  instances.resize(instances.size() - holdout_count);

  int dim = feature_dimension(cfg.regime, cfg.features);
  std::vector<double> weights(dim, 0.0);
  double bias = 0.0;

  TrainReport report;
  std::vector<double> grad(dim, 0.0);
  double grad_bias = 0.0;
  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.full_batch) {
      double loss = loss_and_gradient(instances, weights, bias, cfg.l2, &grad, &grad_bias);
      for (int i = 0; i < dim; ++i) weights[i] -= cfg.learning_rate * grad[i];
      bias -= cfg.learning_rate * grad_bias;
      report.epoch_loss.push_back(loss);
    } else {
      rng.shuffle(order);
      for (std::size_t idx : order) {
        std::span<const TrainingInstance> one(&instances[idx], 1);
        loss_and_gradient(one, weights, bias, cfg.l2, &grad, &grad_bias);
        for (int i = 0; i < dim; ++i) weights[i] -= cfg.learning_rate * grad[i];
        bias -= cfg.learning_rate * grad_bias;
      }
      double loss = loss_and_gradient(instances, weights, bias, cfg.l2, &grad, &grad_bias);
      report.epoch_loss.push_back(loss);
    }
  }

  auto accuracy = [&](const std::vector<TrainingInstance>& set) {
    if (set.empty()) return 0.0;
    long correct = 0;
    for (const auto& inst : set) {
      double z = bias;
      for (int i = 0; i < dim; ++i) z += weights[i] * inst.features[i];
      int predicted = z > 0.0 ? 1 : 0;
      if (predicted == inst.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(set.size());
  };

  report.holdout_accuracy = accuracy(holdout);
  report.model.regime = cfg.regime;
  report.model.features = cfg.features;
  report.model.weights = std::move(weights);
  report.model.bias = bias;
  report.model.epochs = cfg.epochs;
  report.model.learning_rate = cfg.learning_rate;
  report.model.seed = cfg.seed;
  report.model.final_loss = report.epoch_loss.empty() ? 0.0 : report.epoch_loss.back();
  report.model.holdout_accuracy = report.holdout_accuracy;
  report.train_pairs = instances.size();
  report.holdout_pairs = holdout.size();
  return report;
}

std::string model_to_json(const ComparatorModel& model) {
  nlohmann::ordered_json j;
  j["regime"] = to_string(model.regime);
  j["hash_width"] = model.features.hash_width;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["meta"] = {{"epochs", model.epochs},
               {"learning_rate", model.learning_rate},
               {"seed", model.seed},
               {"final_loss", model.final_loss},
               {"holdout_accuracy", model.holdout_accuracy}};
  return j.dump(2) + "\n";
}

ComparatorModel model_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ComparatorModel model;
  model.regime = regime_from_string(j.at("regime").get<std::string>());
  model.features.hash_width = j.at("hash_width").get<int>();
  model.weights = j.at("weights").get<std::vector<double>>();
  model.bias = j.at("bias").get<double>();
  if (j.contains("meta")) {
    const auto& meta = j["meta"];
    model.epochs = meta.value("epochs", 0);
    model.learning_rate = meta.value("learning_rate", 0.0);
    model.seed = meta.value("seed", std::uint64_t{0});
    model.final_loss = meta.value("final_loss", 0.0);
    model.holdout_accuracy = meta.value("holdout_accuracy", 0.0);
  }
  if (static_cast<int>(model.weights.size()) != feature_dimension(model.regime, model.features)) {
    throw std::invalid_argument("model weight length does not match regime dimensionality");
  }
  return model;
}

void save_model(const std::string& path, const ComparatorModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << model_to_json(model);
}

ComparatorModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace readorder
