#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "readorder/comparator.hpp"
#include "readorder/document.hpp"
#include "readorder/external.hpp"
#include "readorder/gaze.hpp"
#include "readorder/io.hpp"
#include "readorder/metrics.hpp"
#include "readorder/preorder.hpp"
#include "readorder/render.hpp"
#include "readorder/sequence.hpp"
#include "readorder/synth.hpp"

namespace py = pybind11;
using namespace readorder;

namespace {

// Lets python callables act as pairwise comparators.
class PyComparator : public PairwiseComparator {
 public:
  PyComparator(py::function fn, bool antisymmetric)
      : fn_(std::move(fn)), antisymmetric_(antisymmetric) {}
  PairScore score(const BoundingBox& left, const BoundingBox& right) override {
    return PairScore{fn_(left, right).cast<double>()};
  }
  bool antisymmetric() const override { return antisymmetric_; }

 private:
  py::function fn_;
  bool antisymmetric_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "reading-order engine for visually-rich documents";

  py::class_<Centroid>(m, "Centroid")
      .def(py::init<>())
      .def_readwrite("x", &Centroid::x)
      .def_readwrite("y", &Centroid::y)
      .def("__repr__", [](const Centroid& c) {
        return "Centroid(x=" + std::to_string(c.x) + ", y=" + std::to_string(c.y) + ")";
      });

  py::class_<BoundingBox>(m, "BoundingBox")
      .def(py::init([](std::string id, double x_up, double y_up, double x_down, double y_down,
                       std::string text) {
             return BoundingBox{std::move(id), x_up, y_up, x_down, y_down, std::move(text)};
           }),
           py::arg("id"), py::arg("x_up"), py::arg("y_up"), py::arg("x_down"),
           py::arg("y_down"), py::arg("text") = "")
      .def_readwrite("id", &BoundingBox::id)
      .def_readwrite("x_up", &BoundingBox::x_up)
      .def_readwrite("y_up", &BoundingBox::y_up)
      .def_readwrite("x_down", &BoundingBox::x_down)
      .def_readwrite("y_down", &BoundingBox::y_down)
      .def_readwrite("text", &BoundingBox::text)
      .def("width", &BoundingBox::width)
      .def("height", &BoundingBox::height)
      .def("area", &BoundingBox::area);

  m.def("centroid", &centroid, py::arg("box"));

  py::enum_<SubsetTag>(m, "SubsetTag")
      .value("WEAK", SubsetTag::kWeak)
      .value("STRUCTURED", SubsetTag::kStructured)
      .value("INFOGRAPH", SubsetTag::kInfograph)
      .value("OTHER", SubsetTag::kOther);

  py::class_<QaPair>(m, "QaPair")
      .def(py::init<>())
      .def_readwrite("question", &QaPair::question)
      .def_readwrite("answers", &QaPair::answers);

  py::class_<Document>(m, "Document")
      .def(py::init<>())
      .def_readwrite("doc_id", &Document::doc_id)
      .def_readwrite("page_width", &Document::page_width)
      .def_readwrite("page_height", &Document::page_height)
      .def_readwrite("subset_tag", &Document::subset_tag)
      .def_readwrite("boxes", &Document::boxes)
      .def_readwrite("qa", &Document::qa)
      .def_readwrite("image_path", &Document::image_path)
      .def("median_box_height", &Document::median_box_height);

  m.def("validate_document", [](const Document& doc) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : validate_document(doc)) out.emplace_back(v.box_id, v.rule);
    return out;
  });

  py::class_<ReadingSequence>(m, "ReadingSequence")
      .def(py::init<>())
      .def_static("from_permutation",
                  py::overload_cast<const std::vector<std::string>&>(
                      &ReadingSequence::from_permutation))
      .def_static("from_permutation_with_universe",
                  py::overload_cast<const std::vector<std::string>&,
                                    const std::vector<std::string>&>(
                      &ReadingSequence::from_permutation))
      .def("set", &ReadingSequence::set)
      .def("ordinal", &ReadingSequence::ordinal)
      .def("as_permutation", &ReadingSequence::as_permutation)
      .def("entries", &ReadingSequence::entries)
      .def("ordered_count", &ReadingSequence::ordered_count)
      .def("missing_count", &ReadingSequence::missing_count)
      .def("invariant_violations", &ReadingSequence::invariant_violations)
      .def("__len__", &ReadingSequence::size)
      .def("__eq__", [](const ReadingSequence& a, const ReadingSequence& b) { return a == b; });
  m.attr("MISSING") = static_cast<int>(ReadingSequence::kMissing);

  // gaze
  py::class_<GazePoint>(m, "GazePoint")
      .def(py::init([](double t, double x, double y, std::optional<double> duration,
                       std::optional<double> pupil) {
             return GazePoint{t, x, y, duration, pupil};
           }),
           py::arg("t"), py::arg("x"), py::arg("y"), py::arg("duration") = py::none(),
           py::arg("pupil") = py::none())
      .def_readwrite("t", &GazePoint::t)
      .def_readwrite("x", &GazePoint::x)
      .def_readwrite("y", &GazePoint::y)
      .def_readwrite("duration", &GazePoint::duration)
      .def_readwrite("pupil", &GazePoint::pupil);

  py::class_<GazeTrajectory>(m, "GazeTrajectory")
      .def(py::init<>())
      .def_readwrite("doc_id", &GazeTrajectory::doc_id)
      .def_readwrite("points", &GazeTrajectory::points);

  py::class_<AlignmentConfig>(m, "AlignmentConfig")
      .def(py::init<>())
      .def_readwrite("periphery_radius", &AlignmentConfig::periphery_radius)
      .def_readwrite("dedupe", &AlignmentConfig::dedupe)
      .def_readwrite("repair", &AlignmentConfig::repair)
      .def("effective_radius", &AlignmentConfig::effective_radius);

  py::class_<RawAssignment>(m, "RawAssignment")
      .def_readonly("box_of_point", &RawAssignment::box_of_point)
      .def_readonly("visits", &RawAssignment::visits);

  m.def("assign_gaze", &assign_gaze, py::arg("doc"), py::arg("trajectory"),
        py::arg("config") = AlignmentConfig{});
  m.def("first_visit_order", &first_visit_order);
  m.def("last_visit_order", &last_visit_order);
  m.def("repair_missing", &repair_missing, py::arg("doc"), py::arg("sequence"),
        py::arg("max_distance"));

  py::class_<GoldResult>(m, "GoldResult")
      .def_readonly("sequence", &GoldResult::sequence)
      .def_readonly("missing_rate", &GoldResult::missing_rate);
  m.def("gold_pipeline", &gold_pipeline, py::arg("doc"), py::arg("trajectory"),
        py::arg("config") = AlignmentConfig{});
  m.def("consolidate", &consolidate);

  py::class_<ScanpathStats>(m, "ScanpathStats")
      .def_readonly("direction_histogram", &ScanpathStats::direction_histogram)
      .def_readonly("saccade_count", &ScanpathStats::saccade_count)
      .def_readonly("mean_saccade_length", &ScanpathStats::mean_saccade_length)
      .def_readonly("backtrack_rate", &ScanpathStats::backtrack_rate)
      .def_readonly("revisit_rate", &ScanpathStats::revisit_rate)
      .def_readonly("page_diagonal", &ScanpathStats::page_diagonal);
  m.def("scanpath_stats", &scanpath_stats);

  py::enum_<ScanPattern>(m, "ScanPattern")
      .value("NORMAL_Z", ScanPattern::kNormalZ)
      .value("LOCAL_PRIORITY", ScanPattern::kLocalPriority)
      .value("CROSS_MODAL", ScanPattern::kCrossModal)
      .value("VISUAL_INSTRUCTION", ScanPattern::kVisualInstruction);

  py::class_<PatternThresholds>(m, "PatternThresholds")
      .def(py::init<>())
      .def_readwrite("backtrack_min", &PatternThresholds::backtrack_min)
      .def_readwrite("revisit_min", &PatternThresholds::revisit_min)
      .def_readwrite("locality_max", &PatternThresholds::locality_max);
  m.def("classify_pattern", &classify_pattern, py::arg("stats"),
        py::arg("thresholds") = PatternThresholds{});

  // orderers + preorder
  py::class_<ZOrderConfig>(m, "ZOrderConfig")
      .def(py::init<>())
      .def_readwrite("y_threshold", &ZOrderConfig::y_threshold)
      .def("effective_threshold", &ZOrderConfig::effective_threshold);
  m.def("default_order", &default_order);
  m.def("z_order", &z_order, py::arg("doc"), py::arg("config") = ZOrderConfig{});
  m.def("xy_order", &xy_order);

  py::class_<PreorderOptions>(m, "PreorderOptions")
      .def(py::init<>())
      .def_readwrite("cache", &PreorderOptions::cache)
      .def_readwrite("early_exit", &PreorderOptions::early_exit)
      .def_readwrite("merge_sort", &PreorderOptions::merge_sort);

  py::class_<PreorderTrace>(m, "PreorderTrace")
      .def_readonly("comparator_calls", &PreorderTrace::comparator_calls)
      .def_readonly("swaps", &PreorderTrace::swaps)
      .def_readonly("pass_swaps", &PreorderTrace::pass_swaps);

  py::class_<PreorderResult>(m, "PreorderResult")
      .def_readonly("arrangement", &PreorderResult::arrangement)
      .def_readonly("sequence", &PreorderResult::sequence)
      .def_readonly("trace", &PreorderResult::trace);

  m.def(
      "preorder",
      [](const Document& doc, const std::vector<std::string>& input_order, py::function fn,
         bool antisymmetric, const PreorderOptions& options) {
        PyComparator comparator(std::move(fn), antisymmetric);
        return preorder(doc, input_order, comparator, options);
      },
      py::arg("doc"), py::arg("input_order"), py::arg("comparator"),
      py::arg("antisymmetric") = false, py::arg("options") = PreorderOptions{});

  // comparator
  py::enum_<FeatureRegime>(m, "FeatureRegime")
      .value("BOX", FeatureRegime::kBox)
      .value("TEXT", FeatureRegime::kText)
      .value("TEXT_BOX", FeatureRegime::kTextBox);

  py::class_<FeatureConfig>(m, "FeatureConfig")
      .def(py::init<>())
      .def_readwrite("hash_width", &FeatureConfig::hash_width);
  m.def("feature_dimension", &feature_dimension);
  m.def("pair_features", &pair_features, py::arg("left"), py::arg("right"),
        py::arg("page_width"), py::arg("page_height"), py::arg("regime"),
        py::arg("config") = FeatureConfig{});

  py::class_<ComparatorModel>(m, "ComparatorModel")
      .def(py::init<>())
      .def_readwrite("regime", &ComparatorModel::regime)
      .def_readwrite("features", &ComparatorModel::features)
      .def_readwrite("weights", &ComparatorModel::weights)
      .def_readwrite("bias", &ComparatorModel::bias)
      .def_readonly("holdout_accuracy", &ComparatorModel::holdout_accuracy)
      .def_readonly("final_loss", &ComparatorModel::final_loss);

  m.def(
      "score",
      [](const ComparatorModel& model, const BoundingBox& left, const BoundingBox& right,
         double page_width, double page_height) {
        return score(model, left, right, page_width, page_height).p;
      },
      py::arg("model"), py::arg("left"), py::arg("right"), py::arg("page_width"),
      py::arg("page_height"));

  m.def("make_pairs", [](const Document& doc, const ReadingSequence& gold,
                         std::optional<int> window) {
    std::vector<std::tuple<int, int, int>> out;
    for (const auto& pair : make_pairs(doc, gold, window)) {
      out.emplace_back(pair.left, pair.right, pair.label);
    }
    return out;
  }, py::arg("doc"), py::arg("gold"), py::arg("window") = py::none());

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("regime", &TrainConfig::regime)
      .def_readwrite("features", &TrainConfig::features)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("holdout_fraction", &TrainConfig::holdout_fraction)
      .def_readwrite("pair_window", &TrainConfig::pair_window)
      .def_readwrite("full_batch", &TrainConfig::full_batch)
      .def_readwrite("l2", &TrainConfig::l2);

  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("model", &TrainReport::model)
      .def_readonly("epoch_loss", &TrainReport::epoch_loss)
      .def_readonly("holdout_accuracy", &TrainReport::holdout_accuracy)
      .def_readonly("train_pairs", &TrainReport::train_pairs)
      .def_readonly("holdout_pairs", &TrainReport::holdout_pairs);

  m.def(
      "train",
      [](const std::vector<std::pair<Document, ReadingSequence>>& corpus,
         const TrainConfig& cfg) {
        std::vector<LabeledDocument> labeled;
        labeled.reserve(corpus.size());
        for (const auto& [doc, gold] : corpus) labeled.push_back({doc, gold});
        return train(labeled, cfg);
      },
      py::arg("corpus"), py::arg("config") = TrainConfig{});

  m.def("save_model", &save_model);
  m.def("load_model", &load_model);

  // external comparator protocol
  py::register_exception<SpawnError>(m, "SpawnError");
  py::register_exception<ProtocolError>(m, "ProtocolError");
  py::register_exception<TimeoutError>(m, "ComparatorTimeout");

  py::class_<ExternalComparator>(m, "ExternalComparator")
      .def(py::init([](const std::vector<std::string>& command, const std::string& regime,
                       double timeout_seconds) {
             ExternalConfig cfg;
             cfg.command = command;
             cfg.regime = regime;
             cfg.timeout_seconds = timeout_seconds;
             return std::make_unique<ExternalComparator>(std::move(cfg));
           }),
           py::arg("command"), py::arg("regime") = "image",
           py::arg("timeout_seconds") = 10.0)
      .def("bind_page", &ExternalComparator::bind_page)
      .def(
          "score",
          [](ExternalComparator& self, const BoundingBox& left, const BoundingBox& right,
             double page_width, double page_height, std::optional<std::string> left_image_ref,
             std::optional<std::string> right_image_ref) {
            return self.score(left, right, page_width, page_height, left_image_ref,
                              right_image_ref).p;
          },
          py::arg("left"), py::arg("right"), py::arg("page_width"), py::arg("page_height"),
          py::arg("left_image_ref") = py::none(), py::arg("right_image_ref") = py::none());

  // strategies
  py::class_<StrategyConfig>(m, "StrategyConfig")
      .def(py::init<>())
      .def_readwrite("z", &StrategyConfig::z)
      .def_readwrite("model", &StrategyConfig::model)
      .def_readwrite("external_command", &StrategyConfig::external_command)
      .def_readwrite("external_regime", &StrategyConfig::external_regime)
      .def_readwrite("external_timeout_seconds", &StrategyConfig::external_timeout_seconds)
      .def_readwrite("preorder", &StrategyConfig::preorder);
  m.def("order_with_strategy", &order_with_strategy, py::arg("doc"), py::arg("strategy"),
        py::arg("config") = StrategyConfig{});
  m.def("known_strategies", &known_strategies);

  // metrics
  py::class_<RankCorrelation>(m, "RankCorrelation")
      .def_readonly("tau", &RankCorrelation::tau)
      .def_readonly("rho", &RankCorrelation::rho)
      .def_readonly("n_common", &RankCorrelation::n_common);
  m.def("rank_correlation", &rank_correlation);
  m.def("kendall_tau", &kendall_tau);
  m.def("spearman_rho", &spearman_rho);
  m.def("missing_rate", &missing_rate);
  m.def("levenshtein",
        [](const std::string& a, const std::string& b) { return levenshtein(a, b); });
  m.def(
      "anls",
      [](const std::string& pred, const std::vector<std::string>& golds, double threshold) {
        return anls(pred, golds, threshold).value;
      },
      py::arg("pred"), py::arg("golds"), py::arg("threshold") = 0.5);
  m.def(
      "mean_anls",
      [](const std::vector<std::pair<std::string, std::vector<std::string>>>& questions,
         double threshold) {
        std::vector<QaPrediction> items;
        items.reserve(questions.size());
        for (const auto& [pred, golds] : questions) items.push_back({pred, golds});
        return mean_anls(items, threshold).value;
      },
      py::arg("questions"), py::arg("threshold") = 0.5);

  // synth + render + files
  py::class_<SynthSpec>(m, "SynthSpec")
      .def(py::init<>())
      .def_readwrite("pattern", &SynthSpec::pattern)
      .def_readwrite("rows", &SynthSpec::rows)
      .def_readwrite("cols", &SynthSpec::cols)
      .def_readwrite("jitter_px", &SynthSpec::jitter_px)
      .def_readwrite("box_jitter_px", &SynthSpec::box_jitter_px)
      .def_readwrite("dropout_rate", &SynthSpec::dropout_rate)
      .def_readwrite("return_rate", &SynthSpec::return_rate)
      .def_readwrite("seed", &SynthSpec::seed)
      .def_readwrite("emit_in_gold_order", &SynthSpec::emit_in_gold_order)
      .def_readwrite("page_width", &SynthSpec::page_width)
      .def_readwrite("page_height", &SynthSpec::page_height);

  py::class_<SynthDocument>(m, "SynthDocument")
      .def_readonly("doc", &SynthDocument::doc)
      .def_readonly("gold", &SynthDocument::gold)
      .def_readonly("trajectory", &SynthDocument::trajectory);
  m.def("synth", &synth);

  py::class_<RenderStyle>(m, "RenderStyle")
      .def(py::init<>())
      .def_readwrite("box_color", &RenderStyle::box_color)
      .def_readwrite("missing_color", &RenderStyle::missing_color)
      .def_readwrite("label_color", &RenderStyle::label_color)
      .def_readwrite("arrow_color", &RenderStyle::arrow_color)
      .def_readwrite("stroke_width", &RenderStyle::stroke_width)
      .def_readwrite("font_size", &RenderStyle::font_size)
      .def_readwrite("arrows", &RenderStyle::arrows);
  m.def("render_svg", &render_svg, py::arg("doc"), py::arg("sequence"),
        py::arg("style") = RenderStyle{});

  m.def(
      "load_document",
      [](const std::filesystem::path& path, const std::string& format) {
        LoadedDocument loaded = load_document(path, corpus_format_from_string(format));
        return std::make_pair(loaded.doc, loaded.gold);
      },
      py::arg("path"), py::arg("format") = "canonical");
  m.def(
      "save_document",
      [](const std::filesystem::path& path, const Document& doc,
         std::optional<ReadingSequence> gold) {
        save_document(path, doc, gold ? &*gold : nullptr);
      },
      py::arg("path"), py::arg("doc"), py::arg("gold") = py::none());
  m.def("load_gaze", &load_gaze);
  m.def("save_gaze", &save_gaze);
  m.def("document_to_json",
        [](const Document& doc, std::optional<ReadingSequence> gold) {
          return document_to_json(doc, gold ? &*gold : nullptr);
        },
        py::arg("doc"), py::arg("gold") = py::none());

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "0.1.0";
#endif
}
