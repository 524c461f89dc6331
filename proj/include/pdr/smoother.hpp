#pragma once

#include <string>
#include <vector>

#include "pdr/filter.hpp"
#include "pdr/metrics.hpp"

namespace pdr {

struct SmoothedTrace {
  std::vector<Vec9> dx;  // dx_{n|N}
  std::vector<Mat9> P;   // P_{n|N}
  std::size_t regularized = 0;  // epochs that needed the Tikhonov fallback
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t size() const { return dx.size(); }
};

struct SmootherOptions {
  bool keep_covariance = true;  // P_{n|N} is dropped when false (saves memory)
};

/// Rauch-Tung-Striebel backward pass over a forward trace:
///   A_n     = P_{n|n} F_{n+1}^T P_{n+1|n}^-1
///   dx_{n|N} = dx_{n|n} + A_n (dx_{n+1|N} - dx_{n+1|n})
///   P_{n|N}  = P_{n|n} + A_n (P_{n+1|N} - P_{n+1|n}) A_n^T
/// using the transition that propagated n to n+1. The last epoch is copied
/// from the filter. A predicted covariance that fails Cholesky is inverted
/// with lambda = 1e-12 * trace added to its diagonal, and counted.
SmoothedTrace rts_smooth(const FilterTrace& trace, const SmootherOptions& options = {});

/// Adds the smoothed dp, dv to the forward nominal states and folds the
/// smoothed beta into C.
std::vector<NavState> compensate_states(const FilterTrace& trace, const SmoothedTrace& smoothed);

/// Position sequence of compensate_states, with the trace timestamps.
Trajectory compensate_trajectory(const FilterTrace& trace, const SmoothedTrace& smoothed);

/// Nominal positions without any error compensation.
Trajectory nominal_trajectory(const FilterTrace& trace);

}  // namespace pdr
