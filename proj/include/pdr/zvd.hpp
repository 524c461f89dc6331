#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdr/ingest.hpp"

namespace pdr {

/// Stance detector configuration. The statistic over a centered window of
/// `window_len` samples is
///
///   T = 1/N * sum_k ( |f_k - g * f_mean/|f_mean||^2 / sigma_a^2 + |w_k|^2 / sigma_g^2 )
///
/// and a sample is stationary when T < gamma.
struct ZuptDetector {
  std::size_t window_len = 5;
  double gamma = 3.0e4;
  double sigma_a = 0.01;        // m/s^2
  double sigma_g = 1.745e-3;    // rad/s (0.1 deg/s)
  double gravity_mag = 9.81;    // m/s^2

  /// Throws InputError on an even or too short window, or non-positive
  /// gamma/sigmas. gamma == 0 is accepted (it simply never fires).
  void validate() const;
};

class ZuptMask {
 public:
  ZuptMask() = default;
  explicit ZuptMask(std::vector<std::uint8_t> flags) : flags_(std::move(flags)) {}
  static ZuptMask constant(std::size_t n, bool stationary) {
    return ZuptMask(std::vector<std::uint8_t>(n, stationary ? 1 : 0));
  }

  [[nodiscard]] bool operator[](std::size_t n) const { return flags_[n] != 0; }
  [[nodiscard]] std::size_t size() const { return flags_.size(); }
  [[nodiscard]] std::size_t count() const;
  void set(std::size_t n, bool stationary) { flags_[n] = stationary ? 1 : 0; }
  [[nodiscard]] std::span<const std::uint8_t> flags() const { return flags_; }

  friend bool operator==(const ZuptMask&, const ZuptMask&) = default;

 private:
  std::vector<std::uint8_t> flags_;
};

/// Test statistic over one window (any length >= 1; order-independent).
double statistic(std::span<const ImuSample> window, const ZuptDetector& det);

/// T for every sample. Edge samples (within half a window of either end)
/// take the value of the nearest fully covered sample. Throws InputError when
/// the log is shorter than the window.
std::vector<double> compute_statistics(const ImuLog& log, const ZuptDetector& det);
/// Single-threaded reference for compute_statistics; identical results.
std::vector<double> compute_statistics_serial(const ImuLog& log, const ZuptDetector& det);

ZuptMask mask_from_statistics(std::span<const double> stats, double gamma);
ZuptMask compute_mask(const ImuLog& log, const ZuptDetector& det);

/// True iff n lies in the initial or final rest interval.
inline bool standstill(std::size_t n, const RestIntervals& rest) { return rest.contains(n); }

}  // namespace pdr
