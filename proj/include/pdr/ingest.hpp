#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pdr/core.hpp"

namespace pdr {

/// One IMU reading: time [s], specific force [m/s^2] and angular rate [rad/s],
/// both in the body frame.
struct ImuSample {
  double t = 0.0;
  Vec3 f = Vec3::Zero();
  Vec3 w = Vec3::Zero();

  friend bool operator==(const ImuSample& a, const ImuSample& b) {
    return a.t == b.t && a.f == b.f && a.w == b.w;
  }
};

/// A validated log: strictly increasing timestamps, at least two samples and no
/// gap larger than 10x the median sample interval. Build through make_log().
class ImuLog {
 public:
  ImuLog() = default;

  [[nodiscard]] std::span<const ImuSample> samples() const { return samples_; }
  [[nodiscard]] const ImuSample& operator[](std::size_t n) const { return samples_[n]; }
  [[nodiscard]] std::size_t size() const { return samples_.size(); }
  [[nodiscard]] bool empty() const { return samples_.empty(); }
  [[nodiscard]] double nominal_rate() const { return nominal_rate_; }
  /// t[n] - t[n-1]; n must be >= 1.
  [[nodiscard]] double dt(std::size_t n) const { return samples_[n].t - samples_[n - 1].t; }
  [[nodiscard]] double duration() const { return samples_.back().t - samples_.front().t; }

  friend bool operator==(const ImuLog& a, const ImuLog& b) { return a.samples_ == b.samples_; }

 private:
  friend ImuLog make_log(std::vector<ImuSample> samples);
  std::vector<ImuSample> samples_;
  double nominal_rate_ = 0.0;
};

/// Validates and wraps samples. Throws OrderingError / GapError / InputError.
ImuLog make_log(std::vector<ImuSample> samples);

struct IngestConfig {
  double min_rest_duration = 1.0;  // s
  double gap_factor = 10.0;        // max(dt) must stay below gap_factor * median(dt)
};

/// Reads the standard `t,fx,fy,fz,wx,wy,wz` CSV. Row numbers in errors are
/// 1-based file lines (the header is line 1).
ImuLog parse_log(const std::filesystem::path& path, const IngestConfig& config = {});
ImuLog parse_log(std::istream& in, const IngestConfig& config = {});

/// Writes the standard CSV with shortest round-trip number formatting, so
/// parse_log(write_log(log)) reproduces the log exactly.
void write_log(std::ostream& out, const ImuLog& log);
void write_log(const std::filesystem::path& path, const ImuLog& log);

/// Column mapping for foreign log layouts, read from a flat `key = value` file.
///
/// Keys: `delimiter` (default ","), `skip_rows` (lines dropped before the
/// header, default 0), `header` (true/false: whether a header row follows),
/// `t`, `fx` ... `wz` (column name when a header exists, otherwise a 0-based
/// index), `time_scale`, `accel_scale`, `gyro_scale` (multipliers to s,
/// m/s^2, rad/s) and `rebase_time` (subtract the first timestamp).
struct ImportMapping {
  char delimiter = ',';
  std::size_t skip_rows = 0;
  bool header = true;
  std::map<std::string, std::string> columns;
  double time_scale = 1.0;
  double accel_scale = 1.0;
  double gyro_scale = 1.0;
  bool rebase_time = true;

  static ImportMapping load(const std::filesystem::path& path);
  static ImportMapping from_text(const std::string& text);
};

ImuLog import_log(std::istream& in, const ImportMapping& mapping, const IngestConfig& config = {});
ImuLog import_log(const std::filesystem::path& path, const ImportMapping& mapping,
                  const IngestConfig& config = {});

struct ZuptDetector;

/// Initial and final standstill of a closed-protocol recording. `tail` may be
/// empty only when built by hand (detect_rest_intervals never returns one).
struct RestIntervals {
  IndexRange head;
  IndexRange tail;

  [[nodiscard]] bool contains(std::size_t n) const { return head.contains(n) || tail.contains(n); }
};

/// Finds the maximal zero-velocity runs touching the first and last sample.
/// Throws ProtocolError when either is missing, shorter than
/// config.min_rest_duration, or when the whole log is one run.
RestIntervals detect_rest_intervals(const ImuLog& log, const ZuptDetector& detector,
                                    const IngestConfig& config = {});

}  // namespace pdr
