#pragma once

#include <cstdint>

#include "readorder/document.hpp"
#include "readorder/gaze.hpp"
#include "readorder/sequence.hpp"

namespace readorder {

// Synthetic document + gold order + trajectory generator. The gold order is
// correct by construction for the chosen pattern; the trajectory visits the
// boxes in gold order with jitter, dropouts and injected returns. Returns are
// drawn from a separate RNG stream, so trajectories with different
// return_rate share the same base visit sequence for a given seed.
struct SynthSpec {
  ScanPattern pattern = ScanPattern::kNormalZ;
  int rows = 3;  // cell-grid rows for local_priority, label count for cross_modal
  int cols = 4;
  double jitter_px = 0.0;      // gaze noise std, per coordinate
  double box_jitter_px = 0.0;  // layout noise bound, uniform in [-b, b]
  double dropout_rate = 0.0;   // fraction of boxes receiving no gaze (rounded)
  double return_rate = 0.0;    // fraction of visits followed by a revisit
  std::uint64_t seed = 0;
  bool emit_in_gold_order = false;  // default: seeded shuffle of emission order
  double page_width = 1000.0;
  double page_height = 800.0;
};

struct SynthDocument {
  Document doc;
  ReadingSequence gold;
  GazeTrajectory trajectory;
};

// Deterministic for a given spec. Throws std::invalid_argument on degenerate
// grids or out-of-range rates.
SynthDocument synth(const SynthSpec& spec);

}  // namespace readorder
