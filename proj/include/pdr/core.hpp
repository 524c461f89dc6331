#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace pdr {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

/// Half-open index range [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  [[nodiscard]] bool empty() const { return end <= begin; }
  [[nodiscard]] std::size_t size() const { return empty() ? 0 : end - begin; }
  [[nodiscard]] bool contains(std::size_t n) const { return n >= begin && n < end; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

// Error hierarchy. Every error names the pipeline stage it came from so the
// CLI can report it; InputError maps to exit code 2, DivergenceError to 3.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t row, const std::string& what)
      : InputError("ingest", "row " + std::to_string(row) + ": " + what), row_(row) {}
  [[nodiscard]] std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class OrderingError : public InputError {
 public:
  explicit OrderingError(const std::string& what) : InputError("ingest", what) {}
};

class GapError : public InputError {
 public:
  explicit GapError(const std::string& what) : InputError("ingest", what) {}
};

/// Raised when a log lacks the rest intervals the closed-loop protocol needs.
class ProtocolError : public InputError {
 public:
  explicit ProtocolError(const std::string& what) : InputError("detect", what) {}
};

class BandError : public InputError {
 public:
  explicit BandError(const std::string& what) : InputError("metrics", what) {}
};

class SegmentationError : public Error {
 public:
  explicit SegmentationError(const std::string& what) : Error("dual", what) {}
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::string stage, std::size_t epoch, const std::string& what)
      : Error(std::move(stage), "epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}
  [[nodiscard]] std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

}  // namespace pdr
