// Command-line front end: gaze alignment, machine ordering, comparator
// training, evaluation, SVG rendering, synthetic corpora and corpus stats.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "readorder/external.hpp"
#include "readorder/gaze.hpp"
#include "readorder/io.hpp"
#include "readorder/metrics.hpp"
#include "readorder/preorder.hpp"
#include "readorder/render.hpp"
#include "readorder/synth.hpp"

namespace fs = std::filesystem;
using namespace readorder;

namespace {

std::vector<std::string> split_command(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

// Bounded worker pool; results land by index so reductions stay deterministic.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  unsigned count = std::min<std::size_t>(jobs, n);
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < count; ++w) {
    workers.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!failed.exchange(true)) first_error = e.what();
          return;
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (failed.load()) throw std::runtime_error(first_error);
}

int run_align(const std::string& doc_path, const std::vector<std::string>& gaze_paths,
              double radius, bool no_dedupe, bool no_repair, std::string out_path,
              bool in_place) {
  LoadedDocument loaded = load_document(doc_path);
  AlignmentConfig cfg;
  if (radius >= 0.0) cfg.periphery_radius = radius;
  cfg.dedupe = !no_dedupe;
  cfg.repair = !no_repair;

  std::vector<ReadingSequence> annotations;
  for (const auto& gaze_path : gaze_paths) {
    GazeTrajectory traj = load_gaze(gaze_path);
    if (!traj.doc_id.empty() && traj.doc_id != loaded.doc.doc_id) {
      throw std::runtime_error("gaze file " + gaze_path + " is for document '" + traj.doc_id +
                               "', not '" + loaded.doc.doc_id + "'");
    }
    annotations.push_back(gold_pipeline(loaded.doc, traj, cfg).sequence);
  }
  ReadingSequence gold = consolidate(annotations);
  double rate = missing_rate(gold, loaded.doc).value_or(0.0);

  if (in_place) out_path = doc_path;
  if (out_path.empty()) {
    throw CLI::ValidationError("--out or --in-place is required");
  }
  save_document(out_path, loaded.doc, &gold);
  std::cout << "doc " << loaded.doc.doc_id << ": " << annotations.size() << " annotation(s), "
            << "missing rate " << rate << "\n";
  return 0;
}

StrategyConfig build_strategy_config(const std::string& strategy, double y_threshold,
                                     const std::string& model_path,
                                     const std::string& external_cmd, double timeout,
                                     bool cache, bool early_exit, bool merge_sort) {
  StrategyConfig cfg;
  if (y_threshold >= 0.0) cfg.z.y_threshold = y_threshold;
  cfg.preorder.cache = cache;
  cfg.preorder.early_exit = early_exit;
  cfg.preorder.merge_sort = merge_sort;
  cfg.external_timeout_seconds = timeout;
  if (strategy == "model") {
    if (model_path.empty()) {
      throw CLI::ValidationError("strategy 'model' needs --model");
    }
    cfg.model = load_model(model_path);
  }
  if (strategy == "external-model") {
    std::string cmd = external_cmd;
    if (cmd.empty()) {
      const char* env = std::getenv("READORDER_EXTERNAL_CMD");
      if (env) cmd = env;
    }
    if (cmd.empty()) {
      throw CLI::ValidationError(
          "strategy 'external-model' needs --external-cmd or READORDER_EXTERNAL_CMD");
    }
    cfg.external_command = split_command(cmd);
  }
  return cfg;
}

int run_order(const std::string& strategy, const std::string& in_path,
              const std::string& out_path, CorpusFormat format, const StrategyConfig& cfg,
              unsigned jobs) {
  if (fs::is_directory(in_path)) {
    fs::create_directories(out_path);
    auto files = list_document_files(in_path);
    parallel_for(files.size(), jobs, [&](std::size_t i) {
      LoadedDocument loaded = load_document(files[i], format);
      OrderFile order{loaded.doc.doc_id, strategy,
                      order_with_strategy(loaded.doc, strategy, cfg)};
      save_order(fs::path(out_path) / (files[i].stem().string() + ".order.json"), order);
    });
    std::cout << "ordered " << files.size() << " document(s) with " << strategy << "\n";
    return 0;
  }
  LoadedDocument loaded = load_document(in_path, format);
  OrderFile order{loaded.doc.doc_id, strategy, order_with_strategy(loaded.doc, strategy, cfg)};
  save_order(out_path, order);
  std::cout << "ordered " << loaded.doc.doc_id << " with " << strategy << "\n";
  return 0;
}

int run_train(const std::string& in_path, const std::string& regime,
              const std::string& out_path, TrainConfig cfg) {
  cfg.regime = regime_from_string(regime);
  std::vector<LabeledDocument> corpus;
  for (auto& loaded : ingest(in_path)) {
    if (!loaded.gold) continue;
    corpus.push_back({std::move(loaded.doc), std::move(*loaded.gold)});
  }
  if (corpus.empty()) {
    throw std::runtime_error("no document under " + in_path + " carries a gold_order");
  }
  TrainReport report = train(corpus, cfg);
  save_model(out_path, report.model);
  std::cout << "trained " << regime << " comparator on " << corpus.size() << " document(s), "
            << report.train_pairs << " pairs; final loss " << report.model.final_loss
            << ", holdout accuracy " << report.holdout_accuracy << " (" << report.holdout_pairs
            << " pairs)\n";
  return 0;
}

int run_eval(const std::string& pred_path, const std::string& gold_path,
             CorpusFormat format, const std::string& out_path, bool micro, bool as_text) {
  std::vector<OrderFile> preds;
  if (fs::is_directory(pred_path)) {
    for (const auto& file : list_json_files(pred_path)) preds.push_back(load_order(file));
  } else {
    preds.push_back(load_order(pred_path));
  }

  std::vector<LoadedDocument> golds = ingest(gold_path, format);
  std::vector<EvalInput> inputs;
  for (const auto& pred : preds) {
    const LoadedDocument* match = nullptr;
    for (const auto& g : golds) {
      if (g.doc.doc_id == pred.doc_id) {
        match = &g;
        break;
      }
    }
    if (!match) throw std::runtime_error("no gold document for '" + pred.doc_id + "'");
    if (!match->gold) {
      throw std::runtime_error("document '" + pred.doc_id + "' has no gold_order");
    }
    inputs.push_back({&match->doc, &*match->gold, &pred.order, pred.strategy});
  }

  CorpusReport report = evaluate_corpus(inputs, micro);
  if (!out_path.empty()) write_file(out_path, report_to_json(report));
  if (as_text || out_path.empty()) std::cout << report_to_text(report) << std::flush;
  return 0;
}

int run_render(const std::string& doc_path, const std::string& order_path, bool use_gold,
               const std::string& out_path) {
  LoadedDocument loaded = load_document(doc_path);
  ReadingSequence seq;
  if (use_gold) {
    if (!loaded.gold) throw std::runtime_error("document has no gold_order to render");
    seq = *loaded.gold;
  } else if (!order_path.empty()) {
    OrderFile order = load_order(order_path);
    if (order.doc_id != loaded.doc.doc_id) {
      throw std::runtime_error("order file is for document '" + order.doc_id + "'");
    }
    seq = order.order;
  } else {
    throw CLI::ValidationError("render needs --order FILE or --gold");
  }
  write_file(out_path, render_svg(loaded.doc, seq));
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int run_synth(const SynthSpec& base, int docs, const std::string& out_dir, bool write_gaze) {
  fs::create_directories(out_dir);
  for (int i = 0; i < docs; ++i) {
    SynthSpec spec = base;
    spec.seed = base.seed + static_cast<std::uint64_t>(i);
    SynthDocument sample = synth(spec);
    char name[64];
    std::snprintf(name, sizeof(name), "doc_%04d", i);
    save_document(fs::path(out_dir) / (std::string(name) + ".json"), sample.doc, &sample.gold);
    if (write_gaze) {
      save_gaze(fs::path(out_dir) / (std::string(name) + ".gaze.json"), sample.trajectory);
    }
  }
  std::cout << "wrote " << docs << " synthetic document(s) to " << out_dir << "\n";
  return 0;
}

int run_stats(const std::string& in_path, const std::string& format_name, bool as_json) {
  CorpusFormat format = corpus_format_from_string(format_name);
  std::vector<std::pair<std::string, Document>> docs;
  fs::path root(in_path);
  bool has_subdirs = false;
  if (fs::is_directory(root)) {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (entry.is_directory()) {
        has_subdirs = true;
        for (auto& loaded : ingest(entry.path(), format)) {
          docs.emplace_back(entry.path().filename().string(), std::move(loaded.doc));
        }
      }
    }
  }
  if (!has_subdirs) {
    for (auto& loaded : ingest(root, format)) {
      docs.emplace_back("all", std::move(loaded.doc));
    }
  }
  std::vector<std::pair<std::string, const Document*>> refs;
  refs.reserve(docs.size());
  for (const auto& [split, doc] : docs) refs.emplace_back(split, &doc);
  CorpusStats stats = corpus_stats(refs);
  std::cout << (as_json ? stats_to_json(stats) : stats_to_text(stats));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reading-order engine for visually-rich documents"};
  app.require_subcommand(1);

  // align
  auto* align = app.add_subcommand("align", "derive a gold order from gaze trajectories");
  std::string align_doc;
  std::vector<std::string> align_gaze;
  double align_radius = -1.0;
  bool align_no_dedupe = false;
  bool align_no_repair = false;
  std::string align_out;
  bool align_in_place = false;
  align->add_option("--doc", align_doc, "canonical document file")->required();
  align->add_option("--gaze", align_gaze, "gaze trajectory file (repeat for annotators)")
      ->required();
  align->add_option("--radius", align_radius, "periphery radius in px (default: auto)");
  align->add_flag("--no-dedupe", align_no_dedupe, "order by last return instead of first visit");
  align->add_flag("--no-repair", align_no_repair, "skip nearest-neighbor repair of unhit boxes");
  align->add_option("--out", align_out, "output document file");
  align->add_flag("--in-place", align_in_place, "rewrite the input document");

  // order
  auto* order = app.add_subcommand("order", "generate a machine reading order");
  std::string order_strategy;
  std::string order_in;
  std::string order_out;
  double order_threshold = -1.0;
  std::string order_model;
  std::string order_external;
  double order_timeout = 10.0;
  bool order_cache = false;
  bool order_early = false;
  bool order_merge = false;
  std::string order_format = "canonical";
  unsigned order_jobs = std::thread::hardware_concurrency();
  order->add_option("--strategy", order_strategy, "one of: default-ocr, z-order, xy-order, model, external-model")
      ->required()
      ->check(CLI::IsMember(known_strategies()));
  order->add_option("--in", order_in, "document file or directory")->required();
  order->add_option("--out", order_out, "order file or directory")->required();
  order->add_option("--y-threshold", order_threshold, "z-order line threshold in px");
  order->add_option("--model", order_model, "trained comparator model file");
  order->add_option("--external-cmd", order_external,
                    "external comparator command line (or READORDER_EXTERNAL_CMD)");
  order->add_option("--timeout", order_timeout, "external reply timeout in seconds");
  order->add_flag("--cache", order_cache, "reuse pair scores within a document");
  order->add_flag("--early-exit", order_early, "stop after a swap-free pass");
  order->add_flag("--merge-sort", order_merge, "comparator-driven merge sort");
  order->add_option("--format", order_format, "input format: canonical or doctrack")
      ->check(CLI::IsMember({"canonical", "doctrack"}));
  order->add_option("--jobs", order_jobs, "worker threads for directories");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a native pairwise comparator");
  std::string train_in;
  std::string train_regime = "box";
  std::string train_out;
  TrainConfig train_cfg;
  int train_window = -1;
  train_cmd->add_option("--in", train_in, "directory of documents with gold_order")->required();
  train_cmd->add_option("--regime", train_regime, "box, text or text_box")
      ->check(CLI::IsMember({"box", "text", "text_box"}));
  train_cmd->add_option("--out", train_out, "model file to write")->required();
  train_cmd->add_option("--epochs", train_cfg.epochs, "training epochs");
  train_cmd->add_option("--lr", train_cfg.learning_rate, "learning rate");
  train_cmd->add_option("--seed", train_cfg.seed, "rng seed");
  train_cmd->add_option("--hash-width", train_cfg.features.hash_width, "text hash buckets");
  train_cmd->add_option("--holdout", train_cfg.holdout_fraction, "held-out pair fraction");
  train_cmd->add_option("--window", train_window, "pair ordinal-distance window");
  train_cmd->add_flag("--full-batch", train_cfg.full_batch, "full-batch gradient steps");
  train_cmd->add_option("--l2", train_cfg.l2, "L2 penalty");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score predicted orders against gold");
  std::string eval_pred;
  std::string eval_gold;
  std::string eval_out;
  std::string eval_format = "canonical";
  bool eval_micro = false;
  bool eval_text = false;
  eval_cmd->add_option("--pred", eval_pred, "order file or directory")->required();
  eval_cmd->add_option("--gold", eval_gold, "document file or directory with gold_order")
      ->required();
  eval_cmd->add_option("--out", eval_out, "report JSON file");
  eval_cmd->add_option("--format", eval_format, "gold format: canonical or doctrack")
      ->check(CLI::IsMember({"canonical", "doctrack"}));
  eval_cmd->add_flag("--micro", eval_micro, "pool pairs instead of averaging documents");
  eval_cmd->add_flag("--text", eval_text, "print the text summary even with --out");

  // render
  auto* render_cmd = app.add_subcommand("render", "draw a reading order as SVG");
  std::string render_doc;
  std::string render_order;
  bool render_gold = false;
  std::string render_out;
  render_cmd->add_option("--doc", render_doc, "canonical document file")->required();
  render_cmd->add_option("--order", render_order, "order file to draw");
  render_cmd->add_flag("--gold", render_gold, "draw the document's gold_order");
  render_cmd->add_option("--out", render_out, "SVG output file")->required();

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic documents with gold + gaze");
  SynthSpec synth_spec;
  std::string synth_pattern = "normal_z";
  int synth_docs = 1;
  std::string synth_out;
  bool synth_no_gaze = false;
  synth_cmd->add_option("--pattern", synth_pattern,
                        "normal_z, local_priority, cross_modal or visual_instruction");
  synth_cmd->add_option("--docs", synth_docs, "number of documents");
  synth_cmd->add_option("--rows", synth_spec.rows, "grid rows");
  synth_cmd->add_option("--cols", synth_spec.cols, "grid cols");
  synth_cmd->add_option("--jitter", synth_spec.jitter_px, "gaze noise std in px");
  synth_cmd->add_option("--box-jitter", synth_spec.box_jitter_px, "layout noise std in px");
  synth_cmd->add_option("--dropout", synth_spec.dropout_rate, "fraction of unvisited boxes");
  synth_cmd->add_option("--return-rate", synth_spec.return_rate, "revisit injection rate");
  synth_cmd->add_option("--seed", synth_spec.seed, "rng seed");
  synth_cmd->add_flag("--emit-gold-order", synth_spec.emit_in_gold_order,
                      "emit boxes in gold order instead of a shuffle");
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_flag("--no-gaze", synth_no_gaze, "skip gaze trajectory files");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "doc/entity/token counts per split and subset");
  std::string stats_in;
  std::string stats_format = "canonical";
  bool stats_json = false;
  stats_cmd->add_option("--in", stats_in, "corpus directory (subdirectories become splits)")
      ->required();
  stats_cmd->add_option("--format", stats_format, "canonical or doctrack")
      ->check(CLI::IsMember({"canonical", "doctrack"}));
  stats_cmd->add_flag("--json", stats_json, "emit JSON instead of the text table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*align) {
      return run_align(align_doc, align_gaze, align_radius, align_no_dedupe, align_no_repair,
                       align_out, align_in_place);
    }
    if (*order) {
      StrategyConfig cfg =
          build_strategy_config(order_strategy, order_threshold, order_model, order_external,
                                order_timeout, order_cache, order_early, order_merge);
      return run_order(order_strategy, order_in, order_out,
                       corpus_format_from_string(order_format), cfg,
                       std::max(1u, order_jobs));
    }
    if (*train_cmd) {
      if (train_window >= 0) train_cfg.pair_window = train_window;
      return run_train(train_in, train_regime, train_out, train_cfg);
    }
    if (*eval_cmd) {
      return run_eval(eval_pred, eval_gold, corpus_format_from_string(eval_format), eval_out,
                      eval_micro, eval_text);
    }
    if (*render_cmd) return run_render(render_doc, render_order, render_gold, render_out);
    if (*synth_cmd) {
      synth_spec.pattern = scan_pattern_from_string(synth_pattern);
      return run_synth(synth_spec, synth_docs, synth_out, !synth_no_gaze);
    }
    if (*stats_cmd) return run_stats(stats_in, stats_format, stats_json);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
