#pragma once

#include "pdr/metrics.hpp"

namespace pdr {

struct AverageOptions {
  // One-sided index repeats in a warping path produce identical consecutive
  // midpoints; they are dropped unless this is false.
  bool collapse_duplicates = true;
};

/// Midpoint of every matched pair, in match order. Timestamps are dropped.
Trajectory average_paths(const Trajectory& a, const Trajectory& b, const MatchResult& match,
                         const AverageOptions& options = {});

/// Index-matched midpoints of equal-length trajectories; timestamps (when both
/// have them) become the pairwise mean. Throws InputError on length mismatch.
Trajectory average_paths_timed(const Trajectory& a, const Trajectory& b);

}  // namespace pdr
