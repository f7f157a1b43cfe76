#include "readorder/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "readorder/rng.hpp"

namespace readorder {

namespace {

struct Layout {
  std::vector<BoundingBox> boxes;  // in gold reading order
  SubsetTag subset = SubsetTag::kOther;
};

// Bounded layout noise: uniform in [-bound, bound], so a jitter below half
// the line threshold keeps every within-row pair inside the threshold.
double layout_jitter(Rng& rng, double bound) {
  if (bound <= 0.0) return 0.0;
  return (2.0 * rng.uniform() - 1.0) * bound;
}

std::string box_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "b%03d", index);
  return buf;
}

// Row-major word grid filling the page.
Layout layout_normal_z(const SynthSpec& spec, Rng& rng) {
  Layout layout;
  layout.subset = SubsetTag::kWeak;
  double cell_w = spec.page_width / (spec.cols + 1);
  double cell_h = spec.page_height / (spec.rows + 1);
  double box_w = cell_w * 0.7;
  double box_h = std::min(cell_h * 0.35, 28.0);
  int index = 0;
  for (int r = 0; r < spec.rows; ++r) {
    for (int c = 0; c < spec.cols; ++c) {
      double x = cell_w * 0.5 + c * cell_w + layout_jitter(rng, spec.box_jitter_px);
      double y = cell_h * 0.5 + r * cell_h + layout_jitter(rng, spec.box_jitter_px);
      BoundingBox box;
      box.id = box_name(index);
      box.x_up = std::clamp(x, 0.0, spec.page_width - box_w);
      box.y_up = std::clamp(y, 0.0, spec.page_height - box_h);
      box.x_down = box.x_up + box_w;
      box.y_down = box.y_up + box_h;
      box.text = "word" + std::to_string(index);
      layout.boxes.push_back(std::move(box));
      ++index;
    }
  }
  return layout;
}

// rows x cols cells, each with a tight 3x3 block of small entries read cell
// by cell; in-cell saccades stay short next to the cell-to-cell jumps.
Layout layout_local_priority(const SynthSpec& spec, Rng& rng) {
  Layout layout;
  layout.subset = SubsetTag::kStructured;
  constexpr int kInner = 3;
  double cell_w = spec.page_width / spec.cols;
  double cell_h = spec.page_height / spec.rows;
  double block_w = cell_w * 0.45;
  double block_h = cell_h * 0.45;
  double step_x = block_w / kInner;
  double step_y = block_h / kInner;
  double box_w = step_x * 0.5;
  double box_h = std::min(step_y * 0.5, 16.0);
  int index = 0;
  for (int cr = 0; cr < spec.rows; ++cr) {
    for (int cc = 0; cc < spec.cols; ++cc) {
      double origin_x = cc * cell_w + (cell_w - block_w) / 2.0;
      double origin_y = cr * cell_h + (cell_h - block_h) / 2.0;
      for (int ir = 0; ir < kInner; ++ir) {
        for (int ic = 0; ic < kInner; ++ic) {
          double x = origin_x + step_x * (ic + 0.5) + layout_jitter(rng, spec.box_jitter_px);
          double y = origin_y + step_y * (ir + 0.5) + layout_jitter(rng, spec.box_jitter_px);
          BoundingBox box;
          box.id = box_name(index);
          box.x_up = std::clamp(x, 0.0, spec.page_width - box_w);
          box.y_up = std::clamp(y, 0.0, spec.page_height - box_h);
          box.x_down = box.x_up + box_w;
          box.y_down = box.y_up + box_h;
          box.text = "cell" + std::to_string(index);
          layout.boxes.push_back(std::move(box));
          ++index;
        }
      }
    }
  }
  return layout;
}

// One central chart region ringed by rows*cols labels, read center first.
Layout layout_cross_modal(const SynthSpec& spec, Rng& rng) {
  Layout layout;
  layout.subset = SubsetTag::kInfograph;
  double cx = spec.page_width / 2.0;
  double cy = spec.page_height / 2.0;
  double chart = std::min(spec.page_width, spec.page_height) * 0.22;

  BoundingBox center;
  center.id = box_name(0);
  center.x_up = cx - chart;
  center.y_up = cy - chart;
  center.x_down = cx + chart;
  center.y_down = cy + chart;
  center.text = "";
  layout.boxes.push_back(std::move(center));

  int labels = spec.rows * spec.cols;
  double radius = std::min(spec.page_width, spec.page_height) * 0.42;
  double label_w = 80.0;
  double label_h = 20.0;
  for (int i = 0; i < labels; ++i) {
    double angle = 2.0 * M_PI * i / labels;
    double x = cx + radius * std::cos(angle) + layout_jitter(rng, spec.box_jitter_px);
    double y = cy + radius * std::sin(angle) + layout_jitter(rng, spec.box_jitter_px);
    BoundingBox box;
    box.id = box_name(i + 1);
    box.x_up = std::clamp(x - label_w / 2.0, 0.0, spec.page_width - label_w);
    box.y_up = std::clamp(y - label_h / 2.0, 0.0, spec.page_height - label_h);
    box.x_down = box.x_up + label_w;
    box.y_down = box.y_up + label_h;
    box.text = "label " + std::to_string(i + 1);
    layout.boxes.push_back(std::move(box));
  }
  return layout;
}

// Staircase flowchart: each step sits right of and below the previous one,
// so re-reads are up-left jumps.
Layout layout_visual_instruction(const SynthSpec& spec, Rng& rng) {
  Layout layout;
  layout.subset = SubsetTag::kInfograph;
  int steps = spec.rows * spec.cols;
  double box_w = spec.page_width / (steps + 2);
  double box_h = spec.page_height / (steps + 2);
  for (int i = 0; i < steps; ++i) {
    double x = box_w * 0.5 + i * box_w + layout_jitter(rng, spec.box_jitter_px);
    double y = box_h * 0.5 + i * box_h + layout_jitter(rng, spec.box_jitter_px);
    BoundingBox box;
    box.id = box_name(i);
    box.x_up = std::clamp(x, 0.0, spec.page_width - box_w * 0.9);
    box.y_up = std::clamp(y, 0.0, spec.page_height - box_h * 0.6);
    box.x_down = box.x_up + box_w * 0.9;
    box.y_down = box.y_up + box_h * 0.6;
    box.text = "step " + std::to_string(i + 1);
    layout.boxes.push_back(std::move(box));
  }
  return layout;
}

GazePoint jittered_center(const BoundingBox& box, double jitter, Rng& rng, double t) {
  Centroid c = centroid(box);
  GazePoint p;
  p.t = t;
  p.x = c.x + rng.normal(jitter);
  p.y = c.y + rng.normal(jitter);
  p.duration = 180.0;
  return p;
}

}  // namespace

SynthDocument synth(const SynthSpec& spec) {
  if (spec.rows <= 0 || spec.cols <= 0) {
    throw std::invalid_argument("synth grid needs positive rows and cols");
  }
  for (double rate : {spec.dropout_rate, spec.return_rate}) {
    if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("rates must be in [0,1]");
  }
  if (spec.jitter_px < 0.0 || spec.box_jitter_px < 0.0) {
    throw std::invalid_argument("jitter must be >= 0");
  }

  Rng layout_rng(spec.seed * 0x9e3779b9ULL + 1);
  Layout layout;
  switch (spec.pattern) {
    case ScanPattern::kNormalZ: layout = layout_normal_z(spec, layout_rng); break;
    case ScanPattern::kLocalPriority: layout = layout_local_priority(spec, layout_rng); break;
    case ScanPattern::kCrossModal: layout = layout_cross_modal(spec, layout_rng); break;
    case ScanPattern::kVisualInstruction:
      layout = layout_visual_instruction(spec, layout_rng);
      break;
  }
  std::size_t n = layout.boxes.size();

  SynthDocument out;
  out.doc.doc_id = to_string(spec.pattern) + "-" + std::to_string(spec.seed);
  out.doc.page_width = spec.page_width;
  out.doc.page_height = spec.page_height;
  out.doc.subset_tag = layout.subset;

  // Emission order: a seeded shuffle of the gold order unless pinned, since
  // OCR output order generally differs from the reading order.
  std::vector<int> emission(n);
  for (std::size_t i = 0; i < n; ++i) emission[i] = static_cast<int>(i);
  if (!spec.emit_in_gold_order) {
    Rng emit_rng(spec.seed * 0x9e3779b9ULL + 2);
    emit_rng.shuffle(emission);
  }
  for (int gold_index : emission) out.doc.boxes.push_back(layout.boxes[gold_index]);

  std::vector<std::string> gold_ids;
  gold_ids.reserve(n);
  for (const auto& box : layout.boxes) gold_ids.push_back(box.id);
  std::vector<std::string> universe = gold_ids;
  out.gold = ReadingSequence::from_permutation(gold_ids, universe);

  // Dropouts: round(rate * n) boxes selected by seed receive no gaze.
  std::vector<bool> dropped(n, false);
  {
    Rng drop_rng(spec.seed * 0x9e3779b9ULL + 3);
    std::vector<int> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = static_cast<int>(i);
    drop_rng.shuffle(indices);
    auto count = static_cast<std::size_t>(std::llround(spec.dropout_rate * n));
    for (std::size_t i = 0; i < count && i < n; ++i) dropped[indices[i]] = true;
  }

  // Base trajectory and injected returns draw from separate streams, so
  // changing return_rate never perturbs the base visit sequence.
  Rng base_rng(spec.seed * 0x9e3779b9ULL + 4);
  Rng return_rng(spec.seed * 0x9e3779b9ULL + 5);
  out.trajectory.doc_id = out.doc.doc_id;
  double t = 0.0;
  std::vector<int> visited;
  bool radial = spec.pattern == ScanPattern::kCrossModal;
  for (std::size_t g = 0; g < n; ++g) {
    if (dropped[g]) continue;
    out.trajectory.points.push_back(
        jittered_center(layout.boxes[g], spec.jitter_px, base_rng, t));
    t += 200.0;
    visited.push_back(static_cast<int>(g));

    // The radial pattern returns to the chart between labels by construction.
    if (radial && g > 0 && g + 1 < n && !dropped[0]) {
      out.trajectory.points.push_back(
          jittered_center(layout.boxes[0], spec.jitter_px, return_rng, t));
      t += 200.0;
    } else if (spec.return_rate > 0.0 && visited.size() > 1 &&
               return_rng.uniform() < spec.return_rate) {
      int back = visited[return_rng.below(visited.size() - 1)];
      out.trajectory.points.push_back(
          jittered_center(layout.boxes[back], spec.jitter_px, return_rng, t));
      t += 200.0;
    }
  }
  return out;
}

}  // namespace readorder
