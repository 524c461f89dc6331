#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pdr/config.hpp"
#include "pdr/filter.hpp"
#include "pdr/ingest.hpp"
#include "pdr/mechanization.hpp"
#include "pdr/metrics.hpp"
#include "pdr/smoother.hpp"
#include "pdr/zvd.hpp"

namespace pdr {

struct DualParams {
  double yaw_grid_deg = 1.0;
  bool yaw_refine = true;
  std::size_t band = 0;          // DTW band in samples; 0 = one step (mean per-foot cycle)
  std::size_t align_stride = 0;  // decimation for the yaw search; 0 = about rate / 10
  double first_leg_tie = 0.1;    // relative displacement difference treated as a tie
};

/// Every tunable of the pipeline. Config file keys are listed by keys().
struct PipelineConfig {
  IngestConfig ingest;
  GravityModel gravity;
  ZuptDetector detector;
  FilterParams filter;
  DualParams dual;

  static PipelineConfig from(const KeyValues& kv);
  static PipelineConfig load(const std::filesystem::path& path);
  [[nodiscard]] KeyValues to_key_values() const;
  static const std::vector<std::string>& keys();

  /// Throws InputError on any invalid value.
  void validate() const;
};

/// One leg ready for filtering: stance mask, rest intervals and the levelled
/// initial state from the head rest.
struct PreparedLeg {
  ImuLog log;
  ZuptMask mask;
  RestIntervals rest;
  NavState init;
};

PreparedLeg prepare_leg(ImuLog log, const PipelineConfig& config);

enum class SolveMode {
  closed_loop,  // standstill position + velocity observations, smoothed
  no_closure,   // velocity-only ZUPTs everywhere, smoothed (the baseline)
};

FilterTrace forward_pass(const PreparedLeg& leg, const PipelineConfig& config, SolveMode mode,
                         const NavState& init);

struct LegSolution {
  Trajectory trajectory;
  std::size_t regularized = 0;
  std::vector<std::string> warnings;
};

/// RTS over a forward trace followed by compensation.
LegSolution smooth_solution(const FilterTrace& trace);

LegSolution solve_leg(const PreparedLeg& leg, const PipelineConfig& config, SolveMode mode);
LegSolution solve_leg(const PreparedLeg& leg, const PipelineConfig& config, SolveMode mode,
                      const NavState& init);

struct SingleSummary {
  std::string mode;
  std::size_t samples = 0;
  double duration_s = 0.0;
  double sample_rate_hz = 0.0;
  double stance_fraction = 0.0;
  double closure_residual_m = 0.0;             // |p_N - p_0|
  double closure_residual_horizontal_m = 0.0;
  double path_length_m = 0.0;
  std::size_t regularized = 0;
  std::vector<std::string> warnings;
};

SingleSummary summarize(const PreparedLeg& leg, const LegSolution& solution, SolveMode mode);

const char* mode_name(SolveMode mode);

}  // namespace pdr
