#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdr/averaging.hpp"
#include "pdr/pipeline.hpp"

namespace pdr {

struct AlignOptions {
  double grid_deg = 1.0;
  std::optional<std::size_t> band;  // full-rate samples; unbanded when absent
  std::size_t stride = 1;           // evaluate on every stride-th point
  bool refine = true;               // golden-section pass around the grid optimum
};

struct YawAlignment {
  double offset = 0.0;  // rad, in (-pi, pi]
  double distance = 0.0;  // DTW distance of the decimated curves at `offset`
  Trajectory aligned;   // b rotated by `offset`
  std::size_t candidates = 0;
};

/// Rotates b about the vertical axis through the origin.
Trajectory rotate_yaw(const Trajectory& b, double yaw);

/// Every stride-th point plus the last one.
std::vector<Vec3> decimate(const std::vector<Vec3>& points, std::size_t stride);

/// Grid angles -180 + k * grid_deg for k = 1 .. floor(360 / grid_deg), in radians.
std::vector<double> yaw_candidates(double grid_deg);

/// DTW distance between a and b rotated by each candidate (OpenMP over
/// candidates) and the single-threaded reference.
std::vector<double> yaw_distances(std::span<const Vec3> a, std::span<const Vec3> b,
                                  std::span<const double> yaws, std::optional<std::size_t> band);
std::vector<double> yaw_distances_serial(std::span<const Vec3> a, std::span<const Vec3> b,
                                         std::span<const double> yaws,
                                         std::optional<std::size_t> band);

/// Brute-force yaw search minimizing the banded DTW distance between a and the
/// rotated b. Ties go to the angle closest to 0.
YawAlignment align_yaw(const Trajectory& a, const Trajectory& b, const AlignOptions& options = {});
YawAlignment align_yaw_serial(const Trajectory& a, const Trajectory& b,
                              const AlignOptions& options = {});

struct FirstLeg {
  int leg = 1;
  double displacement1 = 0.0;  // m, horizontal, over the first movement
  double displacement2 = 0.0;
  bool tie = false;
};

/// The leg whose first movement after the head rest covers less ground.
/// Differences below `tie` (relative) fall back to leg 1 with tie = true.
FirstLeg detect_first_leg(const PreparedLeg& leg1, const PreparedLeg& leg2,
                          const GravityModel& gravity = {}, double tie = 0.1);
FirstLeg detect_first_leg(const ImuLog& log1, const ImuLog& log2, const ZuptDetector& det,
                          const GravityModel& gravity = {}, double tie = 0.1);

/// Samples from k + 1 to the start of the next stationary run. Throws
/// SegmentationError when k is the last sample or no stationary run follows.
std::size_t count_step_length(std::size_t k, const ZuptMask& mask);

struct Segment {
  int leg = 1;
  std::size_t begin = 0;  // first epoch processed
  std::size_t end = 0;    // one past the last
  std::optional<std::size_t> observed;  // epoch of the mid-step tie
  bool fallback = false;
};

struct FusedResult {
  FilterTrace trace1;
  FilterTrace trace2;
  std::vector<Segment> segments;
  std::vector<std::string> warnings;
};

/// Alternating two-leg filter. Each segment is one swing plus the following
/// stance of one leg; at floor(step/2) into the swing the moving foot's
/// horizontal position is tied to the other foot's corrected position at the
/// end of its last stance.
FusedResult fused_filter(const PreparedLeg& leg1, const PreparedLeg& leg2, const NavState& init1,
                         const NavState& init2, int first_leg, const FilterMatrices& mats,
                         const GravityModel& gravity = {});

/// Inter-leg DTW distance per processing mode.
struct DualTable {
  double no_closure = 0.0;   // velocity updates only, independent legs
  double closed_loop = 0.0;  // independent legs
  double fused = 0.0;
};

struct DualLeg {
  PreparedLeg prepared;
  FilterTrace trace;     // fused forward trace (empty unless keep_traces)
  Trajectory baseline;   // no-closure solution
  Trajectory independent;  // closed-loop solution
};

struct DualRun {
  DualLeg leg1, leg2;
  double yaw_offset = 0.0;      // rad, applied to leg 2 before fusion
  double realign_offset = 0.0;  // rad, second search on the fused result
  FirstLeg first;
  Trajectory fused1, fused2;    // smoothed; fused2 re-aligned
  Trajectory combined;
  double dtw_between_legs = 0.0;
  std::size_t band = 0;
  DualTable table;
  std::vector<Segment> segments;
  std::vector<std::string> warnings;
};

struct DualOptions {
  bool keep_traces = false;
};

/// Full-rate DTW band used for the run: one step (mean per-foot cycle length
/// from the stance masks) unless configured, never below the length difference.
std::size_t dual_band(const PreparedLeg& leg1, const PreparedLeg& leg2, const DualParams& params);

DualRun run_dual_pipeline(ImuLog log1, ImuLog log2, const PipelineConfig& config,
                          const DualOptions& options = {});

}  // namespace pdr
