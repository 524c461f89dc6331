#pragma once

// Brute-force references for the metric DPs: every admissible warping path /
// coupling on the grid is enumerated explicitly.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "pdr/metrics.hpp"

namespace pdr::oracle {

using Path = std::vector<IndexPair>;

/// All monotone paths from (0,0) to (n-1,m-1) with unit steps
/// (1,0), (0,1), (1,1), optionally restricted to |i - j| <= band.
inline std::vector<Path> all_paths(std::size_t n, std::size_t m, std::optional<std::size_t> band) {
  std::vector<Path> out;
  Path cur{{0, 0}};
  const auto inside = [&](std::size_t i, std::size_t j) {
    if (i >= n || j >= m) return false;
    if (!band) return true;
    return (i > j ? i - j : j - i) <= *band;
  };
  std::function<void()> walk = [&] {
    const auto [i, j] = cur.back();
    if (i == n - 1 && j == m - 1) {
      out.push_back(cur);
      return;
    }
    for (const IndexPair next : {IndexPair{i + 1, j + 1}, IndexPair{i, j + 1}, IndexPair{i + 1, j}}) {
      if (!inside(next.first, next.second)) continue;
      cur.push_back(next);
      walk();
      cur.pop_back();
    }
  };
  if (inside(0, 0)) walk();
  return out;
}

inline double link(const Trajectory& a, const Trajectory& b, IndexPair p) {
  return (a.points[p.first] - b.points[p.second]).norm();
}

/// Sum of link lengths accumulated in path order.
inline double path_sum(const Trajectory& a, const Trajectory& b, const Path& path) {
  double s = 0.0;
  for (const auto& p : path) s = link(a, b, p) + s;
  return s;
}

inline double path_max(const Trajectory& a, const Trajectory& b, const Path& path) {
  double s = 0.0;
  for (const auto& p : path) s = std::max(s, link(a, b, p));
  return s;
}

struct DtwOracle {
  double min_sum = std::numeric_limits<double>::infinity();
  std::set<std::size_t> lengths;  // path lengths k among the minimizers
};

inline DtwOracle dtw_oracle(const Trajectory& a, const Trajectory& b,
                            std::optional<std::size_t> band = {}) {
  DtwOracle o;
  for (const auto& path : all_paths(a.size(), b.size(), band)) {
    const double s = path_sum(a, b, path);
    if (s < o.min_sum) {
      o.min_sum = s;
      o.lengths = {path.size()};
    } else if (s == o.min_sum) {
      o.lengths.insert(path.size());
    }
  }
  return o;
}

inline double frechet_oracle(const Trajectory& a, const Trajectory& b,
                             std::optional<std::size_t> band = {}) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& path : all_paths(a.size(), b.size(), band)) best = std::min(best, path_max(a, b, path));
  return best;
}

/// True when `pairs` is an admissible path on the (n, m) grid within `band`.
inline bool admissible(const Path& pairs, std::size_t n, std::size_t m,
                       std::optional<std::size_t> band = {}) {
  if (pairs.empty() || pairs.front() != IndexPair{0, 0} || pairs.back() != IndexPair{n - 1, m - 1})
    return false;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    if (band && (i > j ? i - j : j - i) > *band) return false;
    if (k == 0) continue;
    const auto [pi, pj] = pairs[k - 1];
    const std::size_t di = i - pi, dj = j - pj;
    if (i < pi || j < pj || di > 1 || dj > 1 || di + dj == 0) return false;
  }
  return true;
}

/// Random curve with `n` points; integer coordinates on a small lattice when
/// `lattice` is set (to provoke ties), otherwise uniform reals.
inline Trajectory random_curve(std::mt19937_64& rng, std::size_t n, bool lattice) {
  std::uniform_real_distribution<double> real(-2.0, 2.0);
  std::uniform_int_distribution<int> grid(-2, 2);
  Trajectory t;
  for (std::size_t i = 0; i < n; ++i) {
    if (lattice) t.points.emplace_back(grid(rng), grid(rng), 0.0);
    else t.points.emplace_back(real(rng), real(rng), real(rng));
  }
  return t;
}

inline Trajectory scalar_curve(std::initializer_list<double> xs) {
  Trajectory t;
  for (double x : xs) t.points.emplace_back(x, 0.0, 0.0);
  return t;
}

}  // namespace pdr::oracle
