#include "pdr/zvd.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pdr {

void ZuptDetector::validate() const {
  if (window_len < 3 || window_len % 2 == 0)
    throw InputError("config", "zupt window must be odd and >= 3, got " + std::to_string(window_len));
  if (gamma < 0.0) throw InputError("config", "zupt gamma must be non-negative");
  if (!(sigma_a > 0.0) || !(sigma_g > 0.0)) throw InputError("config", "zupt sigmas must be positive");
  if (!(gravity_mag > 0.0)) throw InputError("config", "gravity magnitude must be positive");
}

std::size_t ZuptMask::count() const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

double statistic(std::span<const ImuSample> window, const ZuptDetector& det) {
  Vec3 f_mean = Vec3::Zero();
  for (const auto& s : window) f_mean += s.f;
  f_mean /= static_cast<double>(window.size());
  const double norm = f_mean.norm();
  const Vec3 expected = norm > 0.0 ? Vec3(det.gravity_mag * f_mean / norm) : Vec3::Zero();
  const double inv_a = 1.0 / (det.sigma_a * det.sigma_a);
  const double inv_g = 1.0 / (det.sigma_g * det.sigma_g);
  double sum = 0.0;
  for (const auto& s : window) sum += (s.f - expected).squaredNorm() * inv_a + s.w.squaredNorm() * inv_g;
  return sum / static_cast<double>(window.size());
}

namespace {

void check_length(const ImuLog& log, const ZuptDetector& det) {
  det.validate();
  if (log.size() < det.window_len)
    throw InputError("detect", "log shorter than the zupt window (" + std::to_string(log.size()) +
                                   " < " + std::to_string(det.window_len) + ")");
}

void fill_edges(std::vector<double>& stats, std::size_t half) {
  const std::size_t n = stats.size();
  for (std::size_t i = 0; i < half; ++i) {
    stats[i] = stats[half];
    stats[n - 1 - i] = stats[n - 1 - half];
  }
}

}  // namespace

std::vector<double> compute_statistics_serial(const ImuLog& log, const ZuptDetector& det) {
  check_length(log, det);
  const std::size_t half = det.window_len / 2;
  const auto samples = log.samples();
  std::vector<double> stats(log.size(), 0.0);
  for (std::size_t c = half; c + half < log.size(); ++c)
    stats[c] = statistic(samples.subspan(c - half, det.window_len), det);
  fill_edges(stats, half);
  return stats;
}

std::vector<double> compute_statistics(const ImuLog& log, const ZuptDetector& det) {
  check_length(log, det);
  const std::size_t half = det.window_len / 2;
  const auto samples = log.samples();
  std::vector<double> stats(log.size(), 0.0);
  const auto first = static_cast<std::ptrdiff_t>(half);
  const auto last = static_cast<std::ptrdiff_t>(log.size() - half);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = first; c < last; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    stats[cu] = statistic(samples.subspan(cu - half, det.window_len), det);
  }
  fill_edges(stats, half);
  return stats;
}

ZuptMask mask_from_statistics(std::span<const double> stats, double gamma) {
  std::vector<std::uint8_t> flags(stats.size());
  std::transform(stats.begin(), stats.end(), flags.begin(),
                 [gamma](double t) { return static_cast<std::uint8_t>(t < gamma ? 1 : 0); });
  return ZuptMask(std::move(flags));
}

ZuptMask compute_mask(const ImuLog& log, const ZuptDetector& det) {
  return mask_from_statistics(compute_statistics(log, det), det.gamma);
}

}  // namespace pdr
