#include "pdr/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "pdr/config.hpp"

namespace pdr {

std::string number_text(double value) { return format_number(value); }

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const bool timed = traj.has_timestamps();
  out << (timed ? "t,x,y,z\n" : "x,y,z\n");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Vec3& p = traj.points[i];
    if (timed) out << number_text(traj.timestamps[i]) << ',';
    out << number_text(p.x()) << ',' << number_text(p.y()) << ',' << number_text(p.z()) << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw InputError("report", "cannot write " + path.string());
  write_trajectory_csv(out, traj);
}

Trajectory read_trajectory_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("ingest", name + ": empty file");
  std::string header;
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) header += c;
  bool timed = false;
  if (header == "t,x,y,z") timed = true;
  else if (header != "x,y,z") throw InputError("ingest", name + ": expected header 't,x,y,z' or 'x,y,z'");
  Trajectory traj;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != (timed ? 4u : 3u))
      throw ParseError(row, name + ": wrong number of columns");
    std::size_t c = 0;
    const std::string where = name + " row " + std::to_string(row);
    if (timed) traj.timestamps.push_back(parse_number(cells[c++], where));
    Vec3 p;
    for (int k = 0; k < 3; ++k) p[k] = parse_number(cells[c++], where);
    traj.points.push_back(p);
  }
  if (traj.empty()) throw InputError("ingest", name + ": no points");
  return traj;
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("ingest", "cannot open " + path.string());
  return read_trajectory_csv(in, path.string());
}

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<SvgSeries>& series, const std::string& title) {
  constexpr double kSize = 800.0;
  constexpr double kMargin = 40.0;
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  bool any = false;
  for (const auto& s : series) {
    if (s.trajectory == nullptr) continue;
    for (const auto& p : s.trajectory->points) {
      if (!any) {
        x_min = x_max = p.x();
        y_min = y_max = p.y();
        any = true;
      }
      x_min = std::min(x_min, p.x());
      x_max = std::max(x_max, p.x());
      y_min = std::min(y_min, p.y());
      y_max = std::max(y_max, p.y());
    }
  }
  // Equal axis scaling, centred.
  const double span = std::max({x_max - x_min, y_max - y_min, 1e-6});
  const double scale = (kSize - 2.0 * kMargin) / span;
  const double cx = 0.5 * (x_min + x_max), cy = 0.5 * (y_min + y_max);
  const auto px = [&](double x) { return kSize / 2.0 + (x - cx) * scale; };
  const auto py = [&](double y) { return kSize / 2.0 - (y - cy) * scale; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize + 30
      << "\" viewBox=\"0 0 " << kSize << ' ' << kSize + 30 << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kMargin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << xml_escape(title) << "</text>\n";
  // 1 m scale bar.
  svg << "<line x1=\"" << fixed(kMargin) << "\" y1=\"" << fixed(kSize + 15) << "\" x2=\""
      << fixed(kMargin + scale) << "\" y2=\"" << fixed(kSize + 15)
      << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  svg << "<text x=\"" << fixed(kMargin + scale + 6) << "\" y=\"" << fixed(kSize + 20)
      << "\" font-family=\"sans-serif\" font-size=\"12\">1 m</text>\n";
  double legend_y = 44.0;
  for (const auto& s : series) {
    if (s.trajectory == nullptr || s.trajectory->empty()) continue;
    const auto& pts = s.trajectory->points;
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 20000 + 1);
    svg << "<polyline fill=\"none\" stroke=\"" << xml_escape(s.color) << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); i += stride) {
      svg << fixed(px(pts[i].x())) << ',' << fixed(py(pts[i].y())) << ' ';
    }
    svg << fixed(px(pts.back().x())) << ',' << fixed(py(pts.back().y())) << "\"/>\n";
    svg << "<text x=\"" << fixed(kSize - 200) << "\" y=\"" << fixed(legend_y)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << xml_escape(s.color) << "\">"
        << xml_escape(s.label) << "</text>\n";
    legend_y += 16.0;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string single_summary_json(const SingleSummary& s) {
  nlohmann::ordered_json j;
  j["mode"] = s.mode;
  j["samples"] = s.samples;
  j["duration_s"] = s.duration_s;
  j["sample_rate_hz"] = s.sample_rate_hz;
  j["stance_fraction"] = s.stance_fraction;
  j["closure_residual_m"] = s.closure_residual_m;
  j["closure_residual_horizontal_m"] = s.closure_residual_horizontal_m;
  j["path_length_m"] = s.path_length_m;
  j["regularized_epochs"] = s.regularized;
  j["warnings"] = s.warnings;
  return j.dump(2) + "\n";
}

std::string dual_summary_json(const DualRun& run) {
  constexpr double deg = 180.0 / std::numbers::pi;
  nlohmann::ordered_json j;
  j["yaw_offset_deg"] = run.yaw_offset * deg;
  j["realign_offset_deg"] = run.realign_offset * deg;
  j["first_leg"] = run.first.leg;
  j["first_leg_tie"] = run.first.tie;
  j["dtw_legs_m"] = run.dtw_between_legs;
  j["duration_s"] = std::max(run.leg1.prepared.log.duration(), run.leg2.prepared.log.duration());
  j["band"] = run.band;
  j["combined_length_m"] = run.combined.length();
  std::size_t fallback = 0;
  for (const auto& s : run.segments) fallback += s.fallback ? 1 : 0;
  j["segments"] = run.segments.size();
  j["fallback_segments"] = fallback;
  j["table"] = nlohmann::ordered_json::array({
      {{"mode", "no_closure"}, {"dtw_m", run.table.no_closure}},
      {{"mode", "closed_loop"}, {"dtw_m", run.table.closed_loop}},
      {{"mode", "fused"}, {"dtw_m", run.table.fused}},
  });
  j["warnings"] = run.warnings;
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("report", "cannot write " + path.string());
  out << text;
}

}  // namespace pdr
