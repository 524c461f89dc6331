#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdr/dual.hpp"
#include "pdr/metrics.hpp"
#include "pdr/pipeline.hpp"

namespace pdr {

/// `t,x,y,z` (or `x,y,z` without timestamps), shortest round-trip numbers.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in, const std::string& name = "trajectory");
Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Shortest representation that parses back to the same double.
std::string number_text(double value);

struct SvgSeries {
  const Trajectory* trajectory = nullptr;
  std::string color;
  std::string label;
};

/// Top-down (x, y) polyline plot with equal axis scaling. No timestamps or
/// other run-dependent metadata, so identical input renders identical bytes.
std::string render_svg(const std::vector<SvgSeries>& series, const std::string& title);

std::string single_summary_json(const SingleSummary& summary);
std::string dual_summary_json(const DualRun& run);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pdr
