#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pdr/core.hpp"

namespace pdr {

/// Polygonal curve in R^3. Timestamps are optional (empty or one per point).
struct Trajectory {
  std::vector<Vec3> points;
  std::vector<double> timestamps;

  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] bool empty() const { return points.empty(); }
  [[nodiscard]] bool has_timestamps() const { return !timestamps.empty(); }
  /// Sum of segment lengths.
  [[nodiscard]] double length() const;
  /// Throws InputError when empty, non-finite, or timestamps mis-sized.
  void validate(const char* what = "trajectory") const;
};

using IndexPair = std::pair<std::size_t, std::size_t>;

/// A metric value plus the monotone index pairs that realize it (0-based).
struct MatchResult {
  double distance = 0.0;
  std::vector<IndexPair> pairs;
  double path_cost = 0.0;   // DTW: sum of link lengths; Frechet: longest link
  std::size_t cells = 0;    // DP cells allocated (storage diagnostic)
};

/// Discrete Frechet distance (Eiter-Mannila). With `band`, couplings are
/// restricted to |a_i - b_i| <= band; throws BandError when |n - m| > band.
/// Back-trace ties prefer the diagonal, then (i, j-1), then (i-1, j).
MatchResult frechet(const Trajectory& a, const Trajectory& b, std::optional<std::size_t> band = {});

/// Dynamic time warping with the recurrence
///   D(i,j) = d(i,j) + min{ D(i-1,j), D(i-1,j-1), D(i,j-1) }
/// and the distance normalized by the warping-path length k. Same band and
/// tie rules as frechet(); cells outside the band are +inf.
MatchResult dtw(const Trajectory& a, const Trajectory& b, std::optional<std::size_t> band = {});

/// dtw(a, b, band).distance without storing the path: O(m) memory. Bit-identical
/// to dtw(), including the path length used for normalization.
double dtw_distance(std::span<const Vec3> a, std::span<const Vec3> b,
                    std::optional<std::size_t> band = {});

struct BandDiagnostics {
  std::size_t n = 0, m = 0, band = 0;
  std::size_t dtw_cells = 0;
  std::size_t frechet_cells = 0;
  std::size_t bound = 0;  // (2w+1) * max(n, m)
  [[nodiscard]] bool within_bound() const { return dtw_cells <= bound && frechet_cells <= bound; }
};

/// Runs both banded metrics on deterministic n- and m-point curves and
/// reports the DP storage against the O(w * max(n, m)) bound.
BandDiagnostics banded_storage_check(std::size_t n, std::size_t m, std::size_t band);

}  // namespace pdr
