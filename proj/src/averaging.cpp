#include "pdr/averaging.hpp"

#include <string>

namespace pdr {

Trajectory average_paths(const Trajectory& a, const Trajectory& b, const MatchResult& match,
                         const AverageOptions& options) {
  Trajectory out;
  out.points.reserve(match.pairs.size());
  for (const auto& [i, j] : match.pairs) {
    if (i >= a.size() || j >= b.size())
      throw InputError("average", "match pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                      ") outside the trajectories");
    const Vec3 mid = 0.5 * (a.points[i] + b.points[j]);
    if (options.collapse_duplicates && !out.points.empty() && out.points.back() == mid) continue;
    out.points.push_back(mid);
  }
  return out;
}

Trajectory average_paths_timed(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size())
    throw InputError("average", "index-matched averaging needs equal lengths (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  Trajectory out;
  out.points.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out.points[i] = 0.5 * (a.points[i] + b.points[i]);
  if (a.has_timestamps() && b.has_timestamps()) {
    out.timestamps.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      out.timestamps[i] = 0.5 * (a.timestamps[i] + b.timestamps[i]);
  }
  return out;
}

}  // namespace pdr
