#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "readorder/document.hpp"
#include "readorder/sequence.hpp"

namespace readorder {

struct GazePoint {
  double t = 0.0;  // milliseconds since recording start
  double x = 0.0;
  double y = 0.0;
  std::optional<double> duration;  // fixation duration, ms
  std::optional<double> pupil;     // device units
};

struct GazeTrajectory {
  std::string doc_id;
  std::vector<GazePoint> points;
};

struct AlignmentConfig {
  // Maximum distance at which a point outside every box still counts as a
  // hit on the nearest box. nullopt: half the document's median box height.
  std::optional<double> periphery_radius;
  bool dedupe = true;  // keep the first visit; false keeps the last return
  bool repair = true;  // insert unhit boxes next to their nearest ordered neighbor

  double effective_radius(const Document& doc) const;
};

struct RawAssignment {
  std::vector<int> box_of_point;         // box index per gaze point, -1 = miss
  std::vector<std::vector<int>> visits;  // per box: gaze point indices, ascending
};

// Hit-test every gaze point. A point strictly inside a box hits it (smallest
// area wins on overlap, then lowest id); otherwise the nearest box within the
// periphery radius; otherwise a miss. Throws std::invalid_argument on
// decreasing timestamps.
RawAssignment assign_gaze(const Document& doc, const GazeTrajectory& traj,
                          const AlignmentConfig& cfg);

// Boxes ordered by their first visit; repeated returns are discarded.
// Unvisited boxes get kMissing; ordinals are compacted to 0..k-1.
ReadingSequence first_visit_order(const Document& doc, const RawAssignment& assign);

// Same, ordered by the last return instead (dedupe off).
ReadingSequence last_visit_order(const Document& doc, const RawAssignment& assign);

// Insert each missing box immediately after its nearest ordered box (by
// centroid distance), provided that distance is <= max_distance. Ordinals are
// re-compacted; the relative order of already-ordered boxes never changes.
ReadingSequence repair_missing(const Document& doc, const ReadingSequence& seq,
                               double max_distance);

struct GoldResult {
  ReadingSequence sequence;
  double missing_rate = 0.0;  // fraction of boxes left at kMissing
};

// assign_gaze -> first/last visit order -> repair (flags permitting).
// Repair reach is 3x the effective periphery radius.
GoldResult gold_pipeline(const Document& doc, const GazeTrajectory& traj,
                         const AlignmentConfig& cfg);

// Document-level vote: returns the annotation with the highest mean Kendall
// tau against all others; ties broken by lower missing rate, then position.
// Throws std::invalid_argument on empty input.
ReadingSequence consolidate(const std::vector<ReadingSequence>& annotations);

struct ScanpathStats {
  // Saccade directions in 8 compass bins: E, NE, N, NW, W, SW, S, SE.
  // North is up on the page (negative y). Bins sum to saccade_count.
  std::array<int, 8> direction_histogram{};
  int saccade_count = 0;
  double mean_saccade_length = 0.0;
  double backtrack_rate = 0.0;  // saccades moving up-left (dx<0 and dy<0)
  double revisit_rate = 0.0;    // box re-entries / box entries
  double page_diagonal = 0.0;
};

// Descriptive statistics over a trajectory. Throws std::invalid_argument for
// fewer than 2 points.
ScanpathStats scanpath_stats(const GazeTrajectory& traj, const Document& doc);

enum class ScanPattern { kNormalZ, kLocalPriority, kCrossModal, kVisualInstruction };

std::string to_string(ScanPattern pattern);
ScanPattern scan_pattern_from_string(const std::string& name);

struct PatternThresholds {
  // Radial chart reading revisits a hub box and fans out in all directions;
  // both gates must fire for cross_modal.
  double revisit_min = 0.25;
  double spread_min = 0.55;     // 1 - dominant direction-bin share
  double backtrack_min = 0.18;  // up-left saccade share for visual_instruction
  double locality_max = 0.12;   // mean saccade / page diagonal for local_priority
};

// Deterministic rule cascade; always returns exactly one label.
ScanPattern classify_pattern(const ScanpathStats& stats,
                             const PatternThresholds& thresholds = {});

}  // namespace readorder
