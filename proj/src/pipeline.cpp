#include "pdr/pipeline.hpp"

#include <cmath>

namespace pdr {

const std::vector<std::string>& PipelineConfig::keys() {
  static const std::vector<std::string> k = {
      "ingest.min_rest_duration", "ingest.gap_factor", "gravity",
      "zupt.window",              "zupt.gamma",        "zupt.sigma_a",
      "zupt.sigma_g",             "filter.sigma_a",    "filter.sigma_g",
      "filter.r_vel",             "filter.r_pos",      "filter.r_pos_vel",
      "filter.r_dual",            "filter.p0_pos",     "filter.p0_vel",
      "filter.p0_tilt",           "filter.p0_yaw",     "dual.yaw_grid_deg",
      "dual.yaw_refine",          "dual.band",         "dual.align_stride",
      "dual.first_leg_tie"};
  return k;
}

PipelineConfig PipelineConfig::from(const KeyValues& kv) {
  if (const auto unknown = kv.unknown_keys(keys()); !unknown.empty())
    throw InputError("config", "unknown key '" + unknown.front() + "'");
  PipelineConfig c;
  c.ingest.min_rest_duration = kv.number("ingest.min_rest_duration", c.ingest.min_rest_duration);
  c.ingest.gap_factor = kv.number("ingest.gap_factor", c.ingest.gap_factor);
  const double g = kv.number("gravity", -c.gravity.g.z());
  c.gravity.g = Vec3(0.0, 0.0, -g);
  c.detector.gravity_mag = g;
  const long window = kv.integer("zupt.window", static_cast<long>(c.detector.window_len));
  if (window < 1) throw InputError("config", "zupt.window must be positive");
  c.detector.window_len = static_cast<std::size_t>(window);
  c.detector.gamma = kv.number("zupt.gamma", c.detector.gamma);
  c.detector.sigma_a = kv.number("zupt.sigma_a", c.detector.sigma_a);
  c.detector.sigma_g = kv.number("zupt.sigma_g", c.detector.sigma_g);
  auto& f = c.filter;
  f.sigma_a = kv.number("filter.sigma_a", f.sigma_a);
  f.sigma_g = kv.number("filter.sigma_g", f.sigma_g);
  f.r_vel = kv.number("filter.r_vel", f.r_vel);
  f.r_pos = kv.number("filter.r_pos", f.r_pos);
  f.r_pos_vel = kv.number("filter.r_pos_vel", f.r_pos_vel);
  f.r_dual = kv.number("filter.r_dual", f.r_dual);
  f.p0_pos = kv.number("filter.p0_pos", f.p0_pos);
  f.p0_vel = kv.number("filter.p0_vel", f.p0_vel);
  f.p0_tilt = kv.number("filter.p0_tilt", f.p0_tilt);
  f.p0_yaw = kv.number("filter.p0_yaw", f.p0_yaw);
  auto& d = c.dual;
  d.yaw_grid_deg = kv.number("dual.yaw_grid_deg", d.yaw_grid_deg);
  d.yaw_refine = kv.boolean("dual.yaw_refine", d.yaw_refine);
  const long band = kv.integer("dual.band", static_cast<long>(d.band));
  const long stride = kv.integer("dual.align_stride", static_cast<long>(d.align_stride));
  if (band < 0 || stride < 0) throw InputError("config", "dual.band and dual.align_stride must be >= 0");
  d.band = static_cast<std::size_t>(band);
  d.align_stride = static_cast<std::size_t>(stride);
  d.first_leg_tie = kv.number("dual.first_leg_tie", d.first_leg_tie);
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  return from(KeyValues::load(path));
}

KeyValues PipelineConfig::to_key_values() const {
  KeyValues kv;
  const auto num = [&kv](const char* key, double v) { kv.set(key, format_number(v)); };
  num("ingest.min_rest_duration", ingest.min_rest_duration);
  num("ingest.gap_factor", ingest.gap_factor);
  num("gravity", -gravity.g.z());
  kv.set("zupt.window", std::to_string(detector.window_len));
  num("zupt.gamma", detector.gamma);
  num("zupt.sigma_a", detector.sigma_a);
  num("zupt.sigma_g", detector.sigma_g);
  num("filter.sigma_a", filter.sigma_a);
  num("filter.sigma_g", filter.sigma_g);
  num("filter.r_vel", filter.r_vel);
  num("filter.r_pos", filter.r_pos);
  num("filter.r_pos_vel", filter.r_pos_vel);
  num("filter.r_dual", filter.r_dual);
  num("filter.p0_pos", filter.p0_pos);
  num("filter.p0_vel", filter.p0_vel);
  num("filter.p0_tilt", filter.p0_tilt);
  num("filter.p0_yaw", filter.p0_yaw);
  num("dual.yaw_grid_deg", dual.yaw_grid_deg);
  kv.set("dual.yaw_refine", dual.yaw_refine ? "true" : "false");
  kv.set("dual.band", std::to_string(dual.band));
  kv.set("dual.align_stride", std::to_string(dual.align_stride));
  num("dual.first_leg_tie", dual.first_leg_tie);
  return kv;
}

void PipelineConfig::validate() const {
  if (!(ingest.min_rest_duration >= 0.0)) throw InputError("config", "ingest.min_rest_duration must be >= 0");
  if (!(ingest.gap_factor > 1.0)) throw InputError("config", "ingest.gap_factor must exceed 1");
  gravity.validate();
  detector.validate();
  FilterMatrices::from(filter).validate();
  if (!(dual.yaw_grid_deg > 0.0 && dual.yaw_grid_deg <= 180.0))
    throw InputError("config", "dual.yaw_grid_deg must lie in (0, 180]");
  if (!(dual.first_leg_tie >= 0.0 && dual.first_leg_tie < 1.0))
    throw InputError("config", "dual.first_leg_tie must lie in [0, 1)");
}

PreparedLeg prepare_leg(ImuLog log, const PipelineConfig& config) {
  config.validate();
  PreparedLeg leg;
  leg.mask = compute_mask(log, config.detector);
  leg.rest = detect_rest_intervals(log, config.detector, config.ingest);
  const auto head = log.samples().subspan(leg.rest.head.begin, leg.rest.head.size());
  leg.init = initial_alignment(head, config.gravity);
  leg.log = std::move(log);
  return leg;
}

const char* mode_name(SolveMode mode) {
  return mode == SolveMode::closed_loop ? "closed_loop" : "no_closure";
}

FilterTrace forward_pass(const PreparedLeg& leg, const PipelineConfig& config, SolveMode mode,
                         const NavState& init) {
  const FilterMatrices mats = FilterMatrices::from(config.filter);
  ForwardOptions options;
  options.use_standstill_position = mode == SolveMode::closed_loop;
  return kf_closed_loop_forward(leg.log, leg.mask, leg.rest, init, mats, config.gravity, options);
}

LegSolution smooth_solution(const FilterTrace& trace) {
  const SmoothedTrace smoothed = rts_smooth(trace, {.keep_covariance = false});
  LegSolution out;
  out.trajectory = compensate_trajectory(trace, smoothed);
  out.regularized = smoothed.regularized;
  out.warnings = smoothed.warnings;
  if (trace.damped > 0)
    out.warnings.push_back("filter: large closure error; standstill update damped at " +
                           std::to_string(trace.damped) + " epochs");
  return out;
}

LegSolution solve_leg(const PreparedLeg& leg, const PipelineConfig& config, SolveMode mode) {
  return solve_leg(leg, config, mode, leg.init);
}

LegSolution solve_leg(const PreparedLeg& leg, const PipelineConfig& config, SolveMode mode,
                      const NavState& init) {
  return smooth_solution(forward_pass(leg, config, mode, init));
}

SingleSummary summarize(const PreparedLeg& leg, const LegSolution& solution, SolveMode mode) {
  SingleSummary s;
  s.mode = mode_name(mode);
  s.samples = leg.log.size();
  s.duration_s = leg.log.duration();
  s.sample_rate_hz = leg.log.nominal_rate();
  s.stance_fraction = static_cast<double>(leg.mask.count()) / static_cast<double>(leg.log.size());
  const auto& pts = solution.trajectory.points;
  const Vec3 d = pts.back() - pts.front();
  s.closure_residual_m = d.norm();
  s.closure_residual_horizontal_m = d.head<2>().norm();
  s.path_length_m = solution.trajectory.length();
  s.regularized = solution.regularized;
  s.warnings = solution.warnings;
  return s;
}

}  // namespace pdr
