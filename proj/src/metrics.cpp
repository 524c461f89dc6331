#include "pdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pdr {

double Trajectory::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) total += (points[i] - points[i - 1]).norm();
  return total;
}

void Trajectory::validate(const char* what) const {
  if (points.empty()) throw InputError("metrics", std::string(what) + " is empty");
  for (const auto& p : points)
    if (!p.allFinite()) throw InputError("metrics", std::string(what) + " has non-finite coordinates");
  if (!timestamps.empty() && timestamps.size() != points.size())
    throw InputError("metrics", std::string(what) + " timestamps do not match points");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum Step : std::uint8_t { kStart = 0, kDiag = 1, kLeft = 2, kDown = 3 };

// Column window of row i: [lo, hi] (inclusive), clipped to the grid.
struct Band {
  std::size_t n, m;
  std::optional<std::size_t> w;

  [[nodiscard]] std::size_t lo(std::size_t i) const { return (w && i > *w) ? i - *w : 0; }
  [[nodiscard]] std::size_t hi(std::size_t i) const { return w ? std::min(m - 1, i + *w) : m - 1; }
  [[nodiscard]] std::size_t width() const { return (w && 2 * *w + 1 < m) ? 2 * *w + 1 : m; }
};

Band make_band(std::size_t n, std::size_t m, std::optional<std::size_t> band) {
  if (n == 0 || m == 0) throw InputError("metrics", "trajectories must be non-empty");
  const std::size_t diff = n > m ? n - m : m - n;
  if (band && diff > *band)
    throw BandError("band " + std::to_string(*band) + " cannot couple lengths " + std::to_string(n) +
                    " and " + std::to_string(m));
  return {n, m, band};
}

// Picks the predecessor with the smallest accumulated value; ties keep the
// earlier candidate in the order diagonal, left, down.
struct Choice {
  double value;
  Step step;
};

inline Choice best_predecessor(double diag, double left, double down) {
  Choice c{diag, kDiag};
  if (left < c.value) c = {left, kLeft};
  if (down < c.value) c = {down, kDown};
  return c;
}

// Shared banded DP. Combine(d, best) gives the cell value: d + best for DTW,
// max(d, best) for Frechet. Returns per-cell steps (banded layout) and the
// final cell value.
template <typename Combine>
MatchResult banded_dp(std::span<const Vec3> a, std::span<const Vec3> b, const Band& band,
                      Combine combine) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t width = band.width();
  std::vector<std::uint8_t> steps(n * width, kStart);
  std::vector<double> prev(m, kInf);
  std::vector<double> cur(m, kInf);

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = band.lo(i);
    const std::size_t hi = band.hi(i);
    std::uint8_t* row_steps = steps.data() + i * width;
    for (std::size_t j = lo; j <= hi; ++j) {
      const double d = (a[i] - b[j]).norm();
      if (i == 0 && j == 0) {
        cur[j] = d;
        row_steps[j - lo] = kStart;
        continue;
      }
      const double diag = (i > 0 && j > 0) ? prev[j - 1] : kInf;
      const double left = j > lo ? cur[j - 1] : kInf;
      const double down = i > 0 ? prev[j] : kInf;
      const Choice c = best_predecessor(diag, left, down);
      cur[j] = combine(d, c.value);
      row_steps[j - lo] = c.step;
    }
    if (i + 1 < n) {
      // Row i-1 becomes the scratch row; clear what it wrote.
      if (i > 0)
        std::fill(prev.begin() + static_cast<std::ptrdiff_t>(band.lo(i - 1)),
                  prev.begin() + static_cast<std::ptrdiff_t>(band.hi(i - 1) + 1), kInf);
      std::swap(prev, cur);
    }
  }
  const double final_value = cur[m - 1];
  if (!std::isfinite(final_value)) throw BandError("end cell unreachable within the band");

  MatchResult result;
  result.path_cost = final_value;
  result.cells = n * width;
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  result.pairs.emplace_back(i, j);
  while (i != 0 || j != 0) {
    switch (steps[i * width + (j - band.lo(i))]) {
      case kDiag: --i; --j; break;
      case kLeft: --j; break;
      case kDown: --i; break;
      default: throw BandError("broken back-trace");
    }
    result.pairs.emplace_back(i, j);
  }
  std::reverse(result.pairs.begin(), result.pairs.end());
  return result;
}

}  // namespace

MatchResult dtw(const Trajectory& a, const Trajectory& b, std::optional<std::size_t> band) {
  const Band bnd = make_band(a.size(), b.size(), band);
  MatchResult r = banded_dp(a.points, b.points, bnd, [](double d, double best) { return d + best; });
  r.distance = r.path_cost / static_cast<double>(r.pairs.size());
  return r;
}

MatchResult frechet(const Trajectory& a, const Trajectory& b, std::optional<std::size_t> band) {
  const Band bnd = make_band(a.size(), b.size(), band);
  MatchResult r =
      banded_dp(a.points, b.points, bnd, [](double d, double best) { return std::max(d, best); });
  r.distance = r.path_cost;
  return r;
}

double dtw_distance(std::span<const Vec3> a, std::span<const Vec3> b,
                    std::optional<std::size_t> band) {
  const Band bnd = make_band(a.size(), b.size(), band);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<double> prev(m, kInf), cur(m, kInf);
  std::vector<std::size_t> prev_len(m, 0), cur_len(m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = bnd.lo(i);
    const std::size_t hi = bnd.hi(i);
    for (std::size_t j = lo; j <= hi; ++j) {
      const double d = (a[i] - b[j]).norm();
      if (i == 0 && j == 0) {
        cur[j] = d;
        cur_len[j] = 1;
        continue;
      }
      const double diag = (i > 0 && j > 0) ? prev[j - 1] : kInf;
      const double left = j > lo ? cur[j - 1] : kInf;
      const double down = i > 0 ? prev[j] : kInf;
      const Choice c = best_predecessor(diag, left, down);
      cur[j] = d + c.value;
      switch (c.step) {
        case kDiag: cur_len[j] = prev_len[j - 1] + 1; break;
        case kLeft: cur_len[j] = cur_len[j - 1] + 1; break;
        default: cur_len[j] = prev_len[j] + 1; break;
      }
    }
    if (i + 1 < n) {
      if (i > 0)
        std::fill(prev.begin() + static_cast<std::ptrdiff_t>(bnd.lo(i - 1)),
                  prev.begin() + static_cast<std::ptrdiff_t>(bnd.hi(i - 1) + 1), kInf);
      std::swap(prev, cur);
      std::swap(prev_len, cur_len);
    }
  }
  if (!std::isfinite(cur[m - 1])) throw BandError("end cell unreachable within the band");
  return cur[m - 1] / static_cast<double>(cur_len[m - 1]);
}

BandDiagnostics banded_storage_check(std::size_t n, std::size_t m, std::size_t band) {
  Trajectory a, b;
  a.points.reserve(n);
  b.points.reserve(m);
  for (std::size_t i = 0; i < n; ++i)
    a.points.emplace_back(static_cast<double>(i), std::sin(0.1 * static_cast<double>(i)), 0.0);
  for (std::size_t j = 0; j < m; ++j)
    b.points.emplace_back(static_cast<double>(j), std::cos(0.1 * static_cast<double>(j)), 0.0);
  BandDiagnostics diag;
  diag.n = n;
  diag.m = m;
  diag.band = band;
  diag.dtw_cells = dtw(a, b, band).cells;
  diag.frechet_cells = frechet(a, b, band).cells;
  diag.bound = (2 * band + 1) * std::max(n, m);
  return diag;
}

}  // namespace pdr
