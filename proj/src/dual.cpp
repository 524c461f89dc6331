#include "pdr/dual.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pdr {

namespace {

double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * std::numbers::pi);
  if (y <= -std::numbers::pi) y += 2.0 * std::numbers::pi;
  return y;
}

std::vector<Vec3> rotated(std::span<const Vec3> pts, double yaw) {
  const Mat3 R = yaw_rotation(yaw);
  std::vector<Vec3> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = R * pts[i];
  return out;
}

double distance_at(std::span<const Vec3> a, std::span<const Vec3> b, double yaw,
                   std::optional<std::size_t> band) {
  const auto rb = rotated(b, yaw);
  return dtw_distance(a, rb, band);
}

// Strict lexicographic (distance, |yaw|) order: equal distances go to the
// angle nearest zero, exact ties keep the earlier candidate.
std::size_t best_candidate(const std::vector<double>& dist, const std::vector<double>& yaws) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < dist.size(); ++k) {
    if (dist[k] < dist[best] || (dist[k] == dist[best] && std::abs(yaws[k]) < std::abs(yaws[best])))
      best = k;
  }
  return best;
}

using DistanceFn = std::vector<double> (*)(std::span<const Vec3>, std::span<const Vec3>,
                                           std::span<const double>, std::optional<std::size_t>);

YawAlignment align_with(const Trajectory& a, const Trajectory& b, const AlignOptions& options,
                        DistanceFn distances) {
  a.validate("reference trajectory");
  b.validate("rotated trajectory");
  if (options.stride == 0) throw InputError("dual", "alignment stride must be positive");
  const auto A = decimate(a.points, options.stride);
  const auto B = decimate(b.points, options.stride);
  std::optional<std::size_t> band;
  if (options.band) {
    const std::size_t diff = A.size() > B.size() ? A.size() - B.size() : B.size() - A.size();
    band = std::max((*options.band + options.stride - 1) / options.stride + 1, diff);
  }
  const auto yaws = yaw_candidates(options.grid_deg);
  const auto dist = distances(A, B, yaws, band);
  const std::size_t k = best_candidate(dist, yaws);

  YawAlignment out;
  out.candidates = yaws.size();
  out.offset = yaws[k];
  out.distance = dist[k];
  if (options.refine) {
    // Golden-section search on [best - grid, best + grid].
    const double g = options.grid_deg * std::numbers::pi / 180.0;
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = yaws[k] - g, hi = yaws[k] + g;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = distance_at(A, B, x1, band), f2 = distance_at(A, B, x2, band);
    for (int it = 0; it < 40 && hi - lo > 1e-7; ++it) {
      if (f1 < f2) {
        hi = x2; x2 = x1; f2 = f1;
        x1 = hi - r * (hi - lo);
        f1 = distance_at(A, B, x1, band);
      } else {
        lo = x1; x1 = x2; f1 = f2;
        x2 = lo + r * (hi - lo);
        f2 = distance_at(A, B, x2, band);
      }
    }
    const double x = f1 < f2 ? x1 : x2;
    const double fx = std::min(f1, f2);
    if (fx < out.distance) {
      out.offset = wrap_angle(x);
      out.distance = fx;
    }
  }
  out.aligned = rotate_yaw(b, out.offset);
  return out;
}

}  // namespace

Trajectory rotate_yaw(const Trajectory& b, double yaw) {
  Trajectory out;
  out.points = rotated(b.points, yaw);
  out.timestamps = b.timestamps;
  return out;
}

std::vector<Vec3> decimate(const std::vector<Vec3>& points, std::size_t stride) {
  if (stride <= 1) return points;
  std::vector<Vec3> out;
  out.reserve(points.size() / stride + 2);
  for (std::size_t i = 0; i < points.size(); i += stride) out.push_back(points[i]);
  if (!points.empty() && (points.size() - 1) % stride != 0) out.push_back(points.back());
  return out;
}

std::vector<double> yaw_candidates(double grid_deg) {
  if (!(grid_deg > 0.0 && grid_deg <= 180.0)) throw InputError("dual", "yaw grid must lie in (0, 180] deg");
  const auto count = static_cast<std::size_t>(std::floor(360.0 / grid_deg + 1e-9));
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = (-180.0 + static_cast<double>(k + 1) * grid_deg) * std::numbers::pi / 180.0;
  return out;
}

std::vector<double> yaw_distances(std::span<const Vec3> a, std::span<const Vec3> b,
                                  std::span<const double> yaws, std::optional<std::size_t> band) {
  std::vector<double> out(yaws.size());
  const auto count = static_cast<std::ptrdiff_t>(yaws.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = distance_at(a, b, yaws[static_cast<std::size_t>(k)], band);
  return out;
}

std::vector<double> yaw_distances_serial(std::span<const Vec3> a, std::span<const Vec3> b,
                                         std::span<const double> yaws,
                                         std::optional<std::size_t> band) {
  std::vector<double> out(yaws.size());
  for (std::size_t k = 0; k < yaws.size(); ++k) out[k] = distance_at(a, b, yaws[k], band);
  return out;
}

YawAlignment align_yaw(const Trajectory& a, const Trajectory& b, const AlignOptions& options) {
  return align_with(a, b, options, &yaw_distances);
}

YawAlignment align_yaw_serial(const Trajectory& a, const Trajectory& b, const AlignOptions& options) {
  return align_with(a, b, options, &yaw_distances_serial);
}

namespace {

// Horizontal distance covered by free integration from the end of the head
// rest to the start of the next stationary run.
double first_movement(const PreparedLeg& leg, const GravityModel& gravity) {
  const std::size_t start = leg.rest.head.end;
  std::size_t stop = start;
  while (stop < leg.log.size() && !leg.mask[stop]) ++stop;
  if (stop == start || stop == leg.log.size())
    throw SegmentationError("no complete first movement after the head rest");
  NavState x = leg.init;
  for (std::size_t n = start; n <= stop; ++n) x = mechanize_step(x, leg.log[n], leg.log.dt(n), gravity);
  return x.p.head<2>().norm();
}

}  // namespace

FirstLeg detect_first_leg(const PreparedLeg& leg1, const PreparedLeg& leg2,
                          const GravityModel& gravity, double tie) {
  FirstLeg out;
  out.displacement1 = first_movement(leg1, gravity);
  out.displacement2 = first_movement(leg2, gravity);
  const double larger = std::max(out.displacement1, out.displacement2);
  if (larger <= 0.0 || std::abs(out.displacement1 - out.displacement2) < tie * larger) {
    out.tie = true;
    out.leg = 1;
  } else {
    out.leg = out.displacement1 < out.displacement2 ? 1 : 2;
  }
  return out;
}

FirstLeg detect_first_leg(const ImuLog& log1, const ImuLog& log2, const ZuptDetector& det,
                          const GravityModel& gravity, double tie) {
  PipelineConfig config;
  config.detector = det;
  config.gravity = gravity;
  return detect_first_leg(prepare_leg(log1, config), prepare_leg(log2, config), gravity, tie);
}

std::size_t count_step_length(std::size_t k, const ZuptMask& mask) {
  const std::size_t n_total = mask.size();
  if (k + 1 >= n_total) throw SegmentationError("step search starts at the end of the log");
  std::size_t n = k + 1;
  while (n < n_total && !mask[n]) ++n;
  if (n == n_total) throw SegmentationError("no stationary run after sample " + std::to_string(k));
  return n - (k + 1);
}

namespace {

struct LegRunner {
  const PreparedLeg* leg = nullptr;
  FilterTrace* trace = nullptr;
  FilterState state;
  std::size_t next = 1;

  [[nodiscard]] bool done() const { return next >= leg->log.size(); }
  [[nodiscard]] Vec2 corrected_xy() const {
    return state.nav.p.head<2>() + state.dx.segment<2>(kPos);
  }
};

}  // namespace

FusedResult fused_filter(const PreparedLeg& leg1, const PreparedLeg& leg2, const NavState& init1,
                         const NavState& init2, int first_leg, const FilterMatrices& mats,
                         const GravityModel& gravity) {
  if (first_leg != 1 && first_leg != 2) throw InputError("dual", "first leg must be 1 or 2");
  for (const PreparedLeg* leg : {&leg1, &leg2})
    if (leg->mask.size() != leg->log.size()) throw InputError("dual", "mask does not match log");

  FusedResult out;
  const ForwardOptions options;
  LegRunner runners[2];
  runners[0].leg = &leg1;
  runners[0].trace = &out.trace1;
  runners[0].state = start_trace(out.trace1, leg1.log, init1, mats);
  runners[1].leg = &leg2;
  runners[1].trace = &out.trace2;
  runners[1].state = start_trace(out.trace2, leg2.log, init2, mats);

  const auto process = [&](LegRunner& r, std::size_t end, std::optional<std::size_t> observe,
                           const Vec2& anchor) {
    for (std::size_t n = r.next; n < end; ++n) {
      const Vec2* a = (observe && n == *observe) ? &anchor : nullptr;
      forward_step(r.state, *r.trace, n, r.leg->log, r.leg->mask, r.leg->rest, mats, gravity,
                   options, a);
    }
    r.next = std::max(r.next, end);
  };

  Vec2 pos = Vec2::Zero();

  // One swing plus the following stance of leg `idx`.
  const auto segment = [&](int idx, bool observe) {
    LegRunner& r = runners[idx];
    const std::size_t n_total = r.leg->log.size();
    const std::size_t k = r.next - 1;
    Segment seg;
    seg.leg = idx + 1;
    seg.begin = r.next;
    std::size_t step_len = 0;
    try {
      step_len = count_step_length(k, r.leg->mask);
    } catch (const SegmentationError&) {
      out.warnings.push_back("dual: leg " + std::to_string(idx + 1) +
                             " has no further stance after sample " + std::to_string(k) +
                             "; remaining samples processed without the inter-leg tie");
      process(r, n_total, std::nullopt, pos);
      seg.end = n_total;
      seg.fallback = true;
      out.segments.push_back(seg);
      return;
    }
    std::size_t stance_end = k + 1 + step_len;
    while (stance_end < n_total && r.leg->mask[stance_end]) ++stance_end;
    std::optional<std::size_t> obs;
    if (observe && step_len / 2 >= 1) obs = k + step_len / 2;
    process(r, stance_end, obs, pos);
    seg.end = stance_end;
    seg.observed = obs;
    out.segments.push_back(seg);
  };

  const int f = first_leg - 1;
  const int o = 1 - f;
  process(runners[f], runners[f].leg->rest.head.end, std::nullopt, pos);
  if (!runners[f].done()) segment(f, false);
  pos = runners[f].corrected_xy();
  process(runners[o], runners[o].leg->rest.head.end, std::nullopt, pos);

  int cur = o;
  while (!runners[0].done() || !runners[1].done()) {
    if (!runners[cur].done()) {
      segment(cur, true);
      pos = runners[cur].corrected_xy();
    }
    cur = 1 - cur;
  }
  return out;
}

std::size_t dual_band(const PreparedLeg& leg1, const PreparedLeg& leg2, const DualParams& params) {
  const std::size_t n = leg1.log.size(), m = leg2.log.size();
  const std::size_t diff = n > m ? n - m : m - n;
  if (params.band > 0) return std::max(params.band, diff);
  const auto cycle = [](const PreparedLeg& leg) {
    std::vector<std::size_t> starts;
    for (std::size_t i = 1; i < leg.mask.size(); ++i)
      if (leg.mask[i] && !leg.mask[i - 1]) starts.push_back(i);
    if (starts.size() < 2) return leg.log.nominal_rate();
    return static_cast<double>(starts.back() - starts.front()) / static_cast<double>(starts.size() - 1);
  };
  const double mean = 0.5 * (cycle(leg1) + cycle(leg2));
  return std::max<std::size_t>({static_cast<std::size_t>(std::lround(mean)), diff, 1});
}

DualRun run_dual_pipeline(ImuLog log1, ImuLog log2, const PipelineConfig& config,
                          const DualOptions& options) {
  config.validate();
  DualRun run;
  run.leg1.prepared = prepare_leg(std::move(log1), config);
  run.leg2.prepared = prepare_leg(std::move(log2), config);
  const PreparedLeg& p1 = run.leg1.prepared;
  const PreparedLeg& p2 = run.leg2.prepared;

  run.band = dual_band(p1, p2, config.dual);
  AlignOptions align;
  align.grid_deg = config.dual.yaw_grid_deg;
  align.refine = config.dual.yaw_refine;
  align.band = run.band;
  align.stride = config.dual.align_stride > 0
                     ? config.dual.align_stride
                     : std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(p1.log.nominal_rate() / 10.0)));

  const auto collect = [&run](const LegSolution& s) {
    run.warnings.insert(run.warnings.end(), s.warnings.begin(), s.warnings.end());
  };

  // Independent baseline and closed-loop solutions.
  {
    const LegSolution b1 = solve_leg(p1, config, SolveMode::no_closure);
    const LegSolution b2 = solve_leg(p2, config, SolveMode::no_closure);
    collect(b1);
    collect(b2);
    const YawAlignment al = align_yaw(b1.trajectory, b2.trajectory, align);
    run.table.no_closure = dtw_distance(b1.trajectory.points, al.aligned.points, run.band);
    run.leg1.baseline = b1.trajectory;
    run.leg2.baseline = b2.trajectory;
  }
  {
    const LegSolution i1 = solve_leg(p1, config, SolveMode::closed_loop);
    const LegSolution i2 = solve_leg(p2, config, SolveMode::closed_loop);
    collect(i1);
    collect(i2);
    const YawAlignment al = align_yaw(i1.trajectory, i2.trajectory, align);
    run.yaw_offset = al.offset;
    run.table.closed_loop = dtw_distance(i1.trajectory.points, al.aligned.points, run.band);
    run.leg1.independent = i1.trajectory;
    run.leg2.independent = i2.trajectory;
  }

  run.first = detect_first_leg(p1, p2, config.gravity, config.dual.first_leg_tie);
  if (run.first.tie)
    run.warnings.push_back("dual: first leg indistinguishable; assuming leg 1");

  NavState init2 = p2.init;
  init2.C = init2.C * yaw_rotation(run.yaw_offset).transpose();
  const FilterMatrices mats = FilterMatrices::from(config.filter);
  FusedResult fused = fused_filter(p1, p2, p1.init, init2, run.first.leg, mats, config.gravity);
  run.segments = std::move(fused.segments);
  run.warnings.insert(run.warnings.end(), fused.warnings.begin(), fused.warnings.end());

  const LegSolution s1 = smooth_solution(fused.trace1);
  const LegSolution s2 = smooth_solution(fused.trace2);
  collect(s1);
  collect(s2);
  if (options.keep_traces) {
    run.leg1.trace = std::move(fused.trace1);
    run.leg2.trace = std::move(fused.trace2);
  } else {
    fused.trace1 = {};
    fused.trace2 = {};
  }

  const YawAlignment re = align_yaw(s1.trajectory, s2.trajectory, align);
  run.realign_offset = re.offset;
  run.fused1 = s1.trajectory;
  run.fused2 = re.aligned;
  const MatchResult match = dtw(run.fused1, run.fused2, run.band);
  run.dtw_between_legs = match.distance;
  run.table.fused = match.distance;
  run.combined = average_paths(run.fused1, run.fused2, match);
  return run;
}

}  // namespace pdr
