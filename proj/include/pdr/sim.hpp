#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "pdr/config.hpp"
#include "pdr/ingest.hpp"
#include "pdr/mechanization.hpp"
#include "pdr/metrics.hpp"

namespace pdr {

struct NoiseSpec {
  double sigma_a = 0.0;  // white, per sample [m/s^2]
  double sigma_g = 0.0;  // white, per sample [rad/s]
  double bias_a = 0.0;   // std of the constant per-axis bias [m/s^2]
  double bias_g = 0.0;   // std of the constant per-axis bias [rad/s]
};

/// Two-foot walk along a polyline. Footstep poses are spaced at most
/// step_length apart along each route segment (each swing after the first
/// covers two of them); corners and the final heading change are turned in
/// place in increments of at most 45 deg.
struct GaitSpec {
  std::vector<Vec2> route;
  int laps = 1;
  double step_length = 0.7;       // m between consecutive footstep poses
  double swing_duration = 0.6;    // s
  double stance_duration = 0.2;   // s of double support between swings
  double rest_duration = 3.0;     // s of standstill at both ends
  double sample_rate = 100.0;     // Hz
  double lateral_offset = 0.2;    // m between the feet
  double lift_height = 0.05;      // m
  double pitch_amplitude = 0.4;   // rad
  double mount_yaw1 = 0.0;        // rad, IMU yaw relative to the foot
  double mount_yaw2 = 0.0;
  int first_leg = 1;              // leg that makes the first (half) step
  bool closed_loop = true;
  NoiseSpec noise;
  std::uint64_t seed = 1;

  /// Throws InputError on an invalid spec.
  void validate() const;

  static GaitSpec from(const KeyValues& kv);
  static GaitSpec load(const std::filesystem::path& path);
  static const std::vector<std::string>& keys();
};

/// Out-and-back L: east `a` metres, north `b`, then back the same way.
std::vector<Vec2> l_corridor_route(double a = 20.0, double b = 10.0);
/// Out-and-back along the x axis.
std::vector<Vec2> straight_route(double length);

struct LegTruth {
  // v[n] = (p[n+1] - p[n]) / dt, the velocity the discrete mechanization sees.
  std::vector<NavState> states;
  std::vector<std::uint8_t> stance;  // foot fixed at n (v[n-1] = v[n] = 0, no rotation)
  std::vector<IndexRange> swings;    // maximal non-stance runs
  double v_max = 0.0;
  double path_length = 0.0;          // 3-D length of the true foot path
  double initial_yaw = 0.0;          // heading of the IMU at rest, rad
};

struct GroundTruth {
  std::vector<double> t;
  std::array<LegTruth, 2> legs;

  /// Positions of one leg (1 or 2) in that leg's own navigation frame:
  /// origin at its start, yaw zero along the initial IMU heading.
  [[nodiscard]] Trajectory leg_frame(int leg) const;
};

struct SimResult {
  ImuLog log1;
  ImuLog log2;
  GroundTruth truth;
};

/// Deterministic for a given spec (including the seed).
SimResult generate(const GaitSpec& spec);

}  // namespace pdr
