#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "readorder/io.hpp"
#include "readorder/metrics.hpp"
#include "readorder/synth.hpp"

using namespace readorder;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const char* cli = std::getenv("READORDER_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "READORDER_CLI must point at the CLI binary");
  std::string command = env_prefix + std::string(cli) + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  std::array<char, 512> chunk{};
  while (fgets(chunk.data(), chunk.size(), pipe)) result.output += chunk.data();
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int n = 0;
    path = fs::temp_directory_path() /
           ("readorder-cli-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("synth then order then eval round trip through the CLI") {
  TempDir tmp;
  auto synth_result =
      run_cli("synth --pattern normal_z --docs 3 --rows 3 --cols 4 --seed 7 --out " +
              tmp.str("corpus"));
  CHECK(synth_result.exit_code == 0);
  CHECK(fs::exists(tmp.path / "corpus" / "doc_0000.json"));
  CHECK(fs::exists(tmp.path / "corpus" / "doc_0000.gaze.json"));

  // determinism: a second run produces identical bytes
  run_cli("synth --pattern normal_z --docs 3 --rows 3 --cols 4 --seed 7 --out " +
          tmp.str("corpus2"));
  CHECK(read_file(tmp.path / "corpus" / "doc_0001.json") ==
        read_file(tmp.path / "corpus2" / "doc_0001.json"));

  auto order_result = run_cli("order --strategy z-order --in " + tmp.str("corpus") +
                              " --out " + tmp.str("orders"));
  CHECK(order_result.exit_code == 0);
  CHECK(fs::exists(tmp.path / "orders" / "doc_0000.order.json"));

  auto eval_result = run_cli("eval --pred " + tmp.str("orders") + " --gold " +
                             tmp.str("corpus") + " --out " + tmp.str("report.json"));
  CHECK(eval_result.exit_code == 0);
  std::string report = read_file(tmp.path / "report.json");
  CHECK(report.find("\"mean_tau\": 1.0") != std::string::npos);
}

TEST_CASE("order on a single file writes the strategy name") {
  TempDir tmp;
  SynthSpec spec;
  spec.rows = 2;
  spec.cols = 3;
  spec.seed = 3;
  auto sample = synth(spec);
  save_document(tmp.path / "doc.json", sample.doc, &sample.gold);

  auto result = run_cli("order --strategy default-ocr --in " + tmp.str("doc.json") +
                        " --out " + tmp.str("order.json"));
  CHECK(result.exit_code == 0);
  OrderFile order = load_order(tmp.path / "order.json");
  CHECK(order.strategy == "default-ocr");
  CHECK(order.doc_id == sample.doc.doc_id);
}

TEST_CASE("align produces a gold order from a gaze file") {
  TempDir tmp;
  SynthSpec spec;
  spec.rows = 3;
  spec.cols = 3;
  spec.seed = 11;
  auto sample = synth(spec);
  save_document(tmp.path / "doc.json", sample.doc, nullptr);
  save_gaze(tmp.path / "doc.gaze.json", sample.trajectory);

  auto result = run_cli("align --doc " + tmp.str("doc.json") + " --gaze " +
                        tmp.str("doc.gaze.json") + " --out " + tmp.str("gold.json"));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("missing rate 0") != std::string::npos);
  auto loaded = load_document(tmp.path / "gold.json");
  REQUIRE(loaded.gold.has_value());
  CHECK(*loaded.gold == sample.gold);
}

TEST_CASE("train then order with the model strategy") {
  TempDir tmp;
  run_cli("synth --pattern normal_z --docs 20 --rows 3 --cols 4 --seed 100 --no-gaze --out " +
          tmp.str("train"));
  auto train_result = run_cli("train --in " + tmp.str("train") + " --regime box --out " +
                              tmp.str("model.json") + " --epochs 20 --lr 0.5 --seed 1");
  CHECK(train_result.exit_code == 0);
  CHECK(fs::exists(tmp.path / "model.json"));

  run_cli("synth --pattern normal_z --docs 1 --rows 3 --cols 4 --seed 999 --no-gaze --out " +
          tmp.str("fresh"));
  auto order_result = run_cli("order --strategy model --model " + tmp.str("model.json") +
                              " --in " + tmp.str("fresh") + " --out " + tmp.str("orders"));
  CHECK(order_result.exit_code == 0);

  auto pred = load_order(tmp.path / "orders" / "doc_0000.order.json");
  auto gold_doc = load_document(tmp.path / "fresh" / "doc_0000.json");
  REQUIRE(gold_doc.gold.has_value());
  auto tau = kendall_tau(pred.order, *gold_doc.gold);
  REQUIRE(tau.has_value());
  CHECK(*tau > 0.9);
}

TEST_CASE("eval works on single pred and gold files") {
  TempDir tmp;
  SynthSpec spec;
  spec.rows = 3;
  spec.cols = 3;
  spec.seed = 31;
  auto sample = synth(spec);
  save_document(tmp.path / "doc.json", sample.doc, &sample.gold);
  run_cli("order --strategy z-order --in " + tmp.str("doc.json") + " --out " +
          tmp.str("order.json"));
  auto result = run_cli("eval --pred " + tmp.str("order.json") + " --gold " +
                        tmp.str("doc.json"));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("1.0000") != std::string::npos);
  CHECK(result.output.find("missing") != std::string::npos);
}

TEST_CASE("align consolidates multiple annotators") {
  TempDir tmp;
  SynthSpec spec;
  spec.rows = 3;
  spec.cols = 3;
  spec.seed = 41;
  auto sample = synth(spec);
  save_document(tmp.path / "doc.json", sample.doc, nullptr);
  save_gaze(tmp.path / "g1.json", sample.trajectory);
  // a second annotator with noisier gaze over the same document
  SynthSpec noisy = spec;
  noisy.jitter_px = 3.0;
  auto second = synth(noisy);
  save_gaze(tmp.path / "g2.json", second.trajectory);

  auto result = run_cli("align --doc " + tmp.str("doc.json") + " --gaze " + tmp.str("g1.json") +
                        " --gaze " + tmp.str("g2.json") + " --out " + tmp.str("gold.json"));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("2 annotation(s)") != std::string::npos);
  auto loaded = load_document(tmp.path / "gold.json");
  REQUIRE(loaded.gold.has_value());
  CHECK(loaded.gold->missing_count() == 0);
}

TEST_CASE("cache, early-exit and merge-sort flags leave model orders unchanged") {
  TempDir tmp;
  run_cli("synth --pattern normal_z --docs 10 --rows 3 --cols 4 --seed 300 --no-gaze --out " +
          tmp.str("train"));
  run_cli("train --in " + tmp.str("train") + " --regime box --out " + tmp.str("model.json") +
          " --epochs 20 --lr 0.5 --seed 2");
  run_cli("synth --pattern normal_z --docs 1 --rows 3 --cols 4 --seed 301 --no-gaze --out " +
          tmp.str("doc"));
  std::string in = tmp.str("doc") + "/doc_0000.json";
  run_cli("order --strategy model --model " + tmp.str("model.json") + " --in " + in +
          " --out " + tmp.str("plain.json"));
  run_cli("order --strategy model --model " + tmp.str("model.json") +
          " --cache --early-exit --in " + in + " --out " + tmp.str("fast.json"));
  run_cli("order --strategy model --model " + tmp.str("model.json") + " --merge-sort --in " +
          in + " --out " + tmp.str("merge.json"));
  auto plain = load_order(tmp.path / "plain.json").order;
  CHECK(load_order(tmp.path / "fast.json").order == plain);
  CHECK(load_order(tmp.path / "merge.json").order == plain);
}

TEST_CASE("render emits SVG for gold orders") {
  TempDir tmp;
  run_cli("synth --pattern normal_z --docs 1 --rows 2 --cols 2 --seed 5 --no-gaze --out " +
          tmp.str("c"));
  auto result = run_cli("render --doc " + tmp.str("c") + "/doc_0000.json --gold --out " +
                        tmp.str("out.svg"));
  CHECK(result.exit_code == 0);
  std::string svg = read_file(tmp.path / "out.svg");
  CHECK(svg.find("<svg") != std::string::npos);
}

TEST_CASE("stats reports split and subset counts") {
  TempDir tmp;
  run_cli("synth --pattern normal_z --docs 2 --rows 2 --cols 3 --seed 1 --no-gaze --out " +
          tmp.str("corpus/train"));
  run_cli("synth --pattern normal_z --docs 1 --rows 2 --cols 3 --seed 9 --no-gaze --out " +
          tmp.str("corpus/test"));
  auto result = run_cli("stats --in " + tmp.str("corpus"));
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("[train]") != std::string::npos);
  CHECK(result.output.find("[test]") != std::string::npos);

  auto json_result = run_cli("stats --in " + tmp.str("corpus") + " --json");
  CHECK(json_result.output.find("\"doc\": 2") != std::string::npos);
}

TEST_CASE("unknown strategies and unreadable paths exit nonzero with a diagnostic") {
  auto bad_strategy = run_cli("order --strategy bogus --in x.json --out y.json");
  CHECK(bad_strategy.exit_code != 0);

  auto missing_file = run_cli("order --strategy z-order --in /nonexistent.json --out y.json");
  CHECK(missing_file.exit_code != 0);
  CHECK(missing_file.output.find("error") != std::string::npos);

  auto missing_model = run_cli("order --strategy model --in x.json --out y.json");
  CHECK(missing_model.exit_code != 0);
}

TEST_CASE("doctrack-format corpora flow through order and eval") {
  TempDir tmp;
  fs::create_directories(tmp.path / "raw");
  write_file(tmp.path / "raw" / "form_a.json", R"({
    "form": [
      {"id": 0, "text": "FROM:", "box": [40, 80, 95, 98]},
      {"id": 1, "text": "TO:", "box": [40, 40, 80, 58]},
      {"id": 2, "text": "Mr. Smith", "box": [100, 40, 190, 58]}
    ],
    "reading_order": [1, 2, 0]
  })");
  auto order_result = run_cli("order --strategy z-order --format doctrack --in " +
                              tmp.str("raw") + " --out " + tmp.str("orders"));
  CHECK(order_result.exit_code == 0);
  auto eval_result = run_cli("eval --pred " + tmp.str("orders") + " --gold " + tmp.str("raw") +
                             " --format doctrack");
  CHECK(eval_result.exit_code == 0);
  CHECK(eval_result.output.find("1.0000") != std::string::npos);

  auto stats_result = run_cli("stats --in " + tmp.str("raw") + " --format doctrack --json");
  CHECK(stats_result.exit_code == 0);
  CHECK(stats_result.output.find("\"ent\": 3") != std::string::npos);
}

TEST_CASE("external-model strategy works through the CLI with the stub") {
  const char* stub = std::getenv("READORDER_STUB");
  REQUIRE(stub != nullptr);
  TempDir tmp;
  run_cli("synth --pattern normal_z --docs 1 --rows 2 --cols 3 --seed 2 --no-gaze --out " +
          tmp.str("c"));
  auto result = run_cli("order --strategy external-model --external-cmd \"" +
                        std::string(stub) + " reading\" --in " + tmp.str("c") +
                        "/doc_0000.json --out " + tmp.str("order.json"));
  CHECK(result.exit_code == 0);
  auto pred = load_order(tmp.path / "order.json");
  auto gold_doc = load_document(tmp.path / "c" / "doc_0000.json");
  REQUIRE(gold_doc.gold.has_value());
  CHECK(*kendall_tau(pred.order, *gold_doc.gold) == 1.0);

  // the environment variable supplies the default command line
  auto env_result = run_cli(
      "order --strategy external-model --in " + tmp.str("c") + "/doc_0000.json --out " +
          tmp.str("order_env.json"),
      "READORDER_EXTERNAL_CMD=\"" + std::string(stub) + " reading\" ");
  CHECK(env_result.exit_code == 0);
  CHECK(load_order(tmp.path / "order_env.json").order == pred.order);
}
