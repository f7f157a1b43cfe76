#include "readorder/gaze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "readorder/metrics.hpp"

namespace readorder {

double AlignmentConfig::effective_radius(const Document& doc) const {
  if (periphery_radius) {
    if (*periphery_radius < 0.0) {
      throw std::invalid_argument("periphery_radius must be >= 0");
    }
    return *periphery_radius;
  }
  return doc.median_box_height() / 2.0;
}

namespace {

double centroid_distance(const BoundingBox& a, const BoundingBox& b) {
  Centroid ca = centroid(a);
  Centroid cb = centroid(b);
  return std::hypot(cb.x - ca.x, cb.y - ca.y);
}

// Smaller area wins, then the lexicographically lowest id.
bool more_specific(const BoundingBox& a, const BoundingBox& b) {
  if (a.area() != b.area()) return a.area() < b.area();
  return a.id < b.id;
}

}  // namespace

RawAssignment assign_gaze(const Document& doc, const GazeTrajectory& traj,
                          const AlignmentConfig& cfg) {
  for (std::size_t i = 1; i < traj.points.size(); ++i) {
    if (traj.points[i].t < traj.points[i - 1].t) {
      throw std::invalid_argument("gaze timestamps decrease at point " + std::to_string(i));
    }
  }
  double radius = cfg.effective_radius(doc);

  RawAssignment out;
  out.box_of_point.assign(traj.points.size(), -1);
  out.visits.assign(doc.boxes.size(), {});

  for (std::size_t p = 0; p < traj.points.size(); ++p) {
    const auto& pt = traj.points[p];
    int hit = -1;
    for (std::size_t b = 0; b < doc.boxes.size(); ++b) {
      if (!doc.boxes[b].contains(pt.x, pt.y)) continue;
      if (hit < 0 || more_specific(doc.boxes[b], doc.boxes[hit])) hit = static_cast<int>(b);
    }
    if (hit < 0) {
      // Periphery rule: nearest boundary within the radius.
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < doc.boxes.size(); ++b) {
        double d = doc.boxes[b].boundary_distance(pt.x, pt.y);
        if (d > radius) continue;
        if (d < best || (d == best && hit >= 0 && more_specific(doc.boxes[b], doc.boxes[hit]))) {
          best = d;
          hit = static_cast<int>(b);
        }
      }
    }
    out.box_of_point[p] = hit;
    if (hit >= 0) out.visits[hit].push_back(static_cast<int>(p));
  }
  return out;
}

namespace {

ReadingSequence visit_order(const Document& doc, const RawAssignment& assign, bool first) {
  // Pick each box's anchor visit, then sort boxes by it. Point indices are
  // strictly increasing per box, so the order is total.
  std::vector<std::pair<int, int>> anchored;  // (point index, box index)
  for (std::size_t b = 0; b < assign.visits.size(); ++b) {
    if (assign.visits[b].empty()) continue;
    int anchor = first ? assign.visits[b].front() : assign.visits[b].back();
    anchored.emplace_back(anchor, static_cast<int>(b));
  }
  std::sort(anchored.begin(), anchored.end());

  ReadingSequence seq;
  for (const auto& box : doc.boxes) seq.set(box.id, ReadingSequence::kMissing);
  int ordinal = 0;
  for (const auto& [point, b] : anchored) {
    seq.set(doc.boxes[b].id, ordinal++);
  }
  return seq;
}

}  // namespace

ReadingSequence first_visit_order(const Document& doc, const RawAssignment& assign) {
  return visit_order(doc, assign, true);
}

ReadingSequence last_visit_order(const Document& doc, const RawAssignment& assign) {
  return visit_order(doc, assign, false);
}

ReadingSequence repair_missing(const Document& doc, const ReadingSequence& seq,
                               double max_distance) {
  std::vector<std::string> ordered = seq.as_permutation();
  if (ordered.empty()) return seq;

  // Anchors are the originally ordered boxes only, so insertion order cannot
  // cascade and the relative order of ordered boxes is preserved.
  struct Insertion {
    double distance;
    std::string id;
  };
  std::vector<std::vector<Insertion>> after_anchor(ordered.size());
  std::vector<std::string> still_missing;

  for (const auto& box : doc.boxes) {
    auto ord = seq.ordinal(box.id);
    if (ord.has_value() && *ord >= 0) continue;
    double best = std::numeric_limits<double>::infinity();
    std::size_t anchor = 0;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
      const BoundingBox* candidate = doc.find_box(ordered[i]);
      if (!candidate) continue;
      double d = centroid_distance(box, *candidate);
      if (d < best) {
        best = d;
        anchor = i;
      }
    }
    if (best <= max_distance) {
      after_anchor[anchor].push_back({best, box.id});
    } else {
      still_missing.push_back(box.id);
    }
  }

  std::vector<std::string> repaired;
  repaired.reserve(ordered.size());
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    repaired.push_back(ordered[i]);
    auto& pending = after_anchor[i];
    std::sort(pending.begin(), pending.end(), [](const Insertion& a, const Insertion& b) {
      if (a.distance != b.distance) return a.distance < b.distance;
      return a.id < b.id;
    });
    for (const auto& ins : pending) repaired.push_back(ins.id);
  }

  ReadingSequence out = ReadingSequence::from_permutation(repaired);
  for (const auto& id : still_missing) out.set(id, ReadingSequence::kMissing);
  // Keep entries for boxes the input knew about but the document does not.
  for (const auto& [id, ord] : seq.entries()) {
    if (!out.contains(id)) out.set(id, ord);
  }
  return out;
}

GoldResult gold_pipeline(const Document& doc, const GazeTrajectory& traj,
                         const AlignmentConfig& cfg) {
  RawAssignment assign = assign_gaze(doc, traj, cfg);
  ReadingSequence seq =
      cfg.dedupe ? first_visit_order(doc, assign) : last_visit_order(doc, assign);
  if (cfg.repair) {
    seq = repair_missing(doc, seq, 3.0 * cfg.effective_radius(doc));
  }
  GoldResult result;
  result.sequence = std::move(seq);
  result.missing_rate =
      doc.boxes.empty() ? 0.0
                        : static_cast<double>(result.sequence.missing_count()) /
                              static_cast<double>(doc.boxes.size());
  return result;
}

ReadingSequence consolidate(const std::vector<ReadingSequence>& annotations) {
  if (annotations.empty()) {
    throw std::invalid_argument("consolidate requires at least one annotation");
  }
  if (annotations.size() == 1) return annotations.front();

  std::size_t best = 0;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    double sum = 0.0;
    int defined = 0;
    for (std::size_t j = 0; j < annotations.size(); ++j) {
      if (i == j) continue;
      auto tau = kendall_tau(annotations[i], annotations[j]);
      if (tau) {
        sum += *tau;
        ++defined;
      }
    }
    // Pairs without common ordered boxes carry no signal; an annotation with
    // no defined comparison at all ranks below any real mean.
    double mean = defined > 0 ? sum / defined : -2.0;
    bool wins = mean > best_mean;
    if (mean == best_mean) {
      wins = annotations[i].missing_count() < annotations[best].missing_count();
    }
    if (wins) {
      best = i;
      best_mean = mean;
    }
  }
  return annotations[best];
}

ScanpathStats scanpath_stats(const GazeTrajectory& traj, const Document& doc) {
  if (traj.points.size() < 2) {
    throw std::invalid_argument("scanpath statistics need at least 2 gaze points");
  }
  ScanpathStats stats;
  stats.page_diagonal = std::hypot(doc.page_width, doc.page_height);
  stats.saccade_count = static_cast<int>(traj.points.size()) - 1;

  double total_length = 0.0;
  int backtracks = 0;
  for (std::size_t i = 1; i < traj.points.size(); ++i) {
    double dx = traj.points[i].x - traj.points[i - 1].x;
    double dy = traj.points[i].y - traj.points[i - 1].y;
    total_length += std::hypot(dx, dy);
    if (dx < 0.0 && dy < 0.0) ++backtracks;
    // Screen y grows downward; negate dy so "north" points up the page.
    double angle = std::atan2(-dy, dx);  // [-pi, pi], 0 = east
    int bin = static_cast<int>(std::lround(angle / (M_PI / 4.0)));
    bin = ((bin % 8) + 8) % 8;
    ++stats.direction_histogram[bin];
  }
  stats.mean_saccade_length = total_length / stats.saccade_count;
  stats.backtrack_rate = static_cast<double>(backtracks) / stats.saccade_count;

  // Box entries via strict hit-testing (no periphery): a re-entry is an entry
  // into a box already visited earlier.
  AlignmentConfig strict;
  strict.periphery_radius = 0.0;
  RawAssignment assign = assign_gaze(doc, traj, strict);
  std::vector<bool> seen(doc.boxes.size(), false);
  int entries = 0;
  int reentries = 0;
  int previous = -1;
  for (int b : assign.box_of_point) {
    if (b < 0 || b == previous) {
      if (b >= 0) previous = b;
      continue;
    }
    ++entries;
    if (seen[b]) ++reentries;
    seen[b] = true;
    previous = b;
  }
  stats.revisit_rate = entries > 0 ? static_cast<double>(reentries) / entries : 0.0;
  return stats;
}

std::string to_string(ScanPattern pattern) {
  switch (pattern) {
    case ScanPattern::kNormalZ: return "normal_z";
    case ScanPattern::kLocalPriority: return "local_priority";
    case ScanPattern::kCrossModal: return "cross_modal";
    case ScanPattern::kVisualInstruction: return "visual_instruction";
  }
  return "normal_z";
}

ScanPattern scan_pattern_from_string(const std::string& name) {
  if (name == "normal_z") return ScanPattern::kNormalZ;
  if (name == "local_priority") return ScanPattern::kLocalPriority;
  if (name == "cross_modal") return ScanPattern::kCrossModal;
  if (name == "visual_instruction") return ScanPattern::kVisualInstruction;
  throw std::invalid_argument("unknown scan pattern: " + name);
}

ScanPattern classify_pattern(const ScanpathStats& stats, const PatternThresholds& thresholds) {
  int dominant = 0;
  for (int c : stats.direction_histogram) dominant = std::max(dominant, c);
  double spread =
      stats.saccade_count > 0
          ? 1.0 - static_cast<double>(dominant) / static_cast<double>(stats.saccade_count)
          : 0.0;
  if (stats.revisit_rate >= thresholds.revisit_min && spread >= thresholds.spread_min) {
    return ScanPattern::kCrossModal;
  }
  if (stats.backtrack_rate >= thresholds.backtrack_min) {
    return ScanPattern::kVisualInstruction;
  }
  double diag = stats.page_diagonal > 0.0 ? stats.page_diagonal : 1.0;
  if (stats.mean_saccade_length / diag <= thresholds.locality_max) {
    return ScanPattern::kLocalPriority;
  }
  return ScanPattern::kNormalZ;
}

}  // namespace readorder
