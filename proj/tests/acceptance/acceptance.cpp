// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "../common/oracles.hpp"
#include "pdr/dual.hpp"
#include "pdr/pipeline.hpp"
#include "pdr/sim.hpp"
#include "pdr/smoother.hpp"

using namespace pdr;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

GaitSpec walk(std::vector<Vec2> route, NoiseSpec noise, std::uint64_t seed) {
  GaitSpec s;
  s.route = std::move(route);
  s.noise = noise;
  s.seed = seed;
  return s;
}

const NoiseSpec kMems{0.02, 0.002, 0.05, 0.003};

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

double min_eig(const Mat9& m) {
  return Eigen::SelfAdjointEigenSolver<Mat9>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

void oracle_equivalence(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240501);
  std::uniform_int_distribution<std::size_t> len(1, 6);
  int agree = 0;
  const int pairs = 500;
  for (int rep = 0; rep < pairs; ++rep) {
    const bool lattice = rep % 2 == 0;
    const Trajectory a = oracle::random_curve(rng, len(rng), lattice);
    const Trajectory b = oracle::random_curve(rng, len(rng), lattice);
    const auto d = oracle::dtw_oracle(a, b);
    const MatchResult r = dtw(a, b);
    const MatchResult f = frechet(a, b);
    const bool ok = r.path_cost == d.min_sum && d.lengths.count(r.pairs.size()) == 1 &&
                    r.distance == d.min_sum / static_cast<double>(r.pairs.size()) &&
                    oracle::path_sum(a, b, r.pairs) == d.min_sum && f.distance == oracle::frechet_oracle(a, b) &&
                    oracle::admissible(r.pairs, a.size(), b.size(), {}) &&
                    oracle::admissible(f.pairs, a.size(), b.size(), {});
    agree += ok ? 1 : 0;
  }
  const double t = seconds_since(t0);
  o.detail << agree << "/" << pairs << " pairs equal the exhaustive oracles, " << t << " s";
  o.require(agree == pairs, "oracle mismatch");
  o.require(t < 10.0, "runtime >= 10 s");
}

void hand_values(Outcome& o) {
  const auto q = oracle::scalar_curve({1, 2, 3});
  const double d0 = dtw(q, q).distance;
  const double d1 = dtw(oracle::scalar_curve({1, 3}), q).distance;
  o.detail << "DTW 0 -> " << d0 << ", 1/3 -> " << d1;
  o.require(d0 == 0.0, "identical sequences");
  o.require(std::abs(d1 - 1.0 / 3.0) <= 1e-15, "(1,3) vs (1,2,3)");

  std::mt19937_64 rng(3);
  int diagonal = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const Trajectory a = oracle::random_curve(rng, 2 + rep % 40, false);
    const Trajectory b = oracle::random_curve(rng, a.size(), false);
    const MatchResult r = dtw(a, b, 0);
    bool ok = r.pairs.size() == a.size();
    for (std::size_t i = 0; ok && i < r.pairs.size(); ++i) ok = r.pairs[i] == IndexPair{i, i};
    diagonal += ok ? 1 : 0;
  }
  const MatchResult shift = dtw(oracle::scalar_curve({0, 1, 2, 3}), oracle::scalar_curve({1, 2, 3, 4}), 1);
  o.detail << "; equal-length pairs diagonal at w=0 in " << diagonal
           << "/200 (band is |i-j| <= w, so w=1 admits one-sample shifts: shifted path cost " << shift.path_cost
           << " vs diagonal 4)";
  o.require(diagonal == 200, "diagonal matching");
}

void filter_consistency(Outcome& o) {
  const auto t0 = Clock::now();
  const PipelineConfig cfg;
  const FilterMatrices mats = FilterMatrices::from(cfg.filter);

  const SimResult clean = generate(walk(straight_route(22.0), {}, 1));
  const PreparedLeg leg = prepare_leg(clean.log1, cfg);
  const FilterTrace kf = kf_zupt_run(leg.log, leg.mask, leg.init, mats);
  const double e_clean = (kf.nav.back().p - clean.truth.leg_frame(1).points.back()).norm();
  o.detail << "noiseless " << clean.log1.duration() << " s walk end error " << e_clean << " m";
  o.require(clean.log1.duration() >= 60.0, "walk shorter than 60 s");
  o.require(e_clean < 1e-3, "noiseless end error");

  o.detail << "; noisy improvement";
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SimResult sim = generate(walk(straight_route(22.0), kMems, seed));
    const PreparedLeg l = prepare_leg(sim.log1, cfg);
    const Vec3 truth = sim.truth.leg_frame(1).points.back();
    const FilterTrace f = kf_zupt_run(l.log, l.mask, l.init, mats);
    const FilterTrace raw = kf_zupt_run(l.log, ZuptMask::constant(l.log.size(), false), l.init, mats);
    const double ratio = (raw.nav.back().p - truth).head<2>().norm() / (f.nav.back().p - truth).head<2>().norm();
    o.detail << " " << ratio << "x";
    o.require(ratio >= 10.0, "noisy improvement < 10x (seed " + std::to_string(seed) + ")");
  }
  const double t = seconds_since(t0);
  o.detail << ", " << t << " s";
  o.require(t < 30.0, "runtime >= 30 s");
}

void closure_property(Outcome& o) {
  const PipelineConfig cfg;
  const double sigma = cfg.filter.r_pos;
  double worst_end = 0.0, worst_jump_ratio = 0.0;
  const std::vector<std::pair<std::vector<Vec2>, std::uint64_t>> walks = {
      {straight_route(22.0), 1}, {straight_route(22.0), 2}, {straight_route(22.0), 3}, {l_corridor_route(), 4}};
  for (const auto& [route, seed] : walks) {
    const SimResult sim = generate(walk(route, kMems, seed));
    const PreparedLeg leg = prepare_leg(sim.log1, cfg);
    const Trajectory traj = solve_leg(leg, cfg, SolveMode::closed_loop).trajectory;
    worst_end = std::max(worst_end, traj.points.back().norm());
    const double v_max = sim.truth.legs[0].v_max;
    for (std::size_t n = 1; n < traj.size(); ++n)
      worst_jump_ratio =
          std::max(worst_jump_ratio, (traj.points[n] - traj.points[n - 1]).norm() / (v_max * leg.log.dt(n)));
  }
  o.detail << walks.size() << " closed walks: worst endpoint " << worst_end << " m (3 sigma = " << 3.0 * sigma
           << " m), worst jump " << worst_jump_ratio << " x v_max dt";
  o.require(worst_end <= 3.0 * sigma, "endpoint outside 3 sigma");
  o.require(worst_jump_ratio <= 3.0, "jump > 3 v_max dt");
}

void smoother_properties(Outcome& o) {
  const PipelineConfig cfg;
  double worst = 0.0, boundary = 0.0;
  std::size_t epochs = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SimResult sim = generate(walk(straight_route(3.0), kMems, seed));
    const PreparedLeg leg = prepare_leg(sim.log1, cfg);
    const FilterTrace trace = forward_pass(leg, cfg, SolveMode::closed_loop, leg.init);
    const SmoothedTrace s = rts_smooth(trace);
    for (std::size_t n = 0; n < trace.size(); ++n) worst = std::min(worst, min_eig(trace.P[n] - s.P[n]));
    epochs += trace.size();
    boundary = std::max({boundary, (s.P.back() - trace.P.back()).cwiseAbs().maxCoeff(),
                         (s.dx.back() - trace.dx.back()).cwiseAbs().maxCoeff()});
  }
  o.detail << "20 runs, " << epochs << " epochs: min eig(P_filt - P_smooth) " << worst << ", boundary difference "
           << boundary;
  o.require(worst >= -1e-9, "PSD ordering");
  o.require(boundary <= 1e-15, "boundary identity");
}

void table_ordering(Outcome& o) {
  const auto t0 = Clock::now();
  const std::vector<std::pair<const char*, const char*>> routes = {{"90 s", "0,0;25,0;25,12;0,12;0,0"},
                                                                   {"240 s", "0,0;70,0;70,30;0,30;0,0"},
                                                                   {"600 s", "0,0;170,0;170,80;0,80;0,0"}};
  for (std::size_t r = 0; r < routes.size(); ++r) {
    o.detail << (r ? "; " : "") << routes[r].first << ":";
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      KeyValues kv;
      kv.set("route", routes[r].second);
      GaitSpec spec = GaitSpec::from(kv);
      spec.noise = kMems;
      spec.seed = seed;
      spec.mount_yaw2 = 20.0 * kDeg;
      const SimResult sim = generate(spec);
      const DualRun run = run_dual_pipeline(sim.log1, sim.log2, PipelineConfig{});
      const DualTable& t = run.table;
      const double ratio = t.no_closure / t.fused;
      o.detail << " " << t.no_closure << ">" << t.closed_loop << ">" << t.fused << " (" << ratio << "x)";
      const std::string tag = std::string(routes[r].first) + " seed " + std::to_string(seed);
      o.require(t.no_closure > t.closed_loop && t.closed_loop > t.fused, "ordering " + tag);
      if (r + 1 == routes.size()) o.require(ratio >= 5.0, "ratio < 5x " + tag);
    }
  }
  const double t = seconds_since(t0);
  o.detail << "; " << t << " s";
  o.require(t < 120.0, "runtime >= 2 min");
}

void yaw_alignment(Outcome& o) {
  const std::vector<double> offsets = {30.0, -30.0, 90.0, -90.0, 150.0};
  const auto wrap = [](double deg) { return std::abs(std::remainder(deg, 360.0)); };

  // Injected into an estimated walk: b is a rotated copy of a.
  const SimResult sim = generate(walk(l_corridor_route(), kMems, 7));
  const PipelineConfig cfg;
  const PreparedLeg leg1 = prepare_leg(sim.log1, cfg);
  const Trajectory a = solve_leg(leg1, cfg, SolveMode::closed_loop).trajectory;
  AlignOptions opt;
  opt.band = dual_band(leg1, prepare_leg(sim.log2, cfg), cfg.dual);
  double worst_rot = 0.0;
  for (const double offset : offsets) {
    const YawAlignment r = align_yaw(a, rotate_yaw(a, offset * kDeg), opt);
    worst_rot = std::max(worst_rot, wrap(r.offset / kDeg + offset));
  }
  o.detail << "rotated estimate: worst error " << worst_rot << " deg";
  o.require(worst_rot <= 1.0, "rotated-copy yaw error > 1 deg");

  // Injected as the mounting yaw of the second foot. Gyro biases differ per
  // foot and show up as heading drift between the legs, so they are left out.
  double worst = 0.0;
  o.detail << "; mounting yaw end to end:";
  for (const double offset : offsets) {
    GaitSpec spec = walk(l_corridor_route(), {0.02, 0.002, 0.05, 0.0}, 7);
    spec.mount_yaw2 = offset * kDeg;
    const SimResult s = generate(spec);
    const DualRun run = run_dual_pipeline(s.log1, s.log2, cfg);
    o.detail << " " << offset << "->" << run.yaw_offset / kDeg;
    worst = std::max(worst, wrap(run.yaw_offset / kDeg - (spec.mount_yaw2 - spec.mount_yaw1) / kDeg));
  }
  o.detail << " deg, worst error " << worst << " deg";
  o.require(worst <= 1.0, "mounting yaw error > 1 deg");
}

void orientation_equivalence(Outcome& o) {
  const GravityModel g;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto vec = [&](double s) { return Vec3(normal(rng), normal(rng), normal(rng)) * s; };
  NavState x;
  x.C = incremental_rotation(vec(1.0), 1.0);
  Eigen::Quaterniond q = quaternion_from_orientation(x.C);
  Vec3 v = Vec3::Zero();
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    ImuSample s;
    s.w = vec(3.0);
    s.f = vec(10.0);
    x = mechanize_step(x, s, 0.01, g);
    std::tie(q, v) = quaternion_step(q, v, s, 0.01, g);
    worst = std::max(worst, max_abs(x.C - orientation_from_quaternion(q)));
  }
  o.detail << "10000 random steps, max |dC| " << worst;
  o.require(worst < 1e-9, "orientation mismatch");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"metric oracle equivalence", oracle_equivalence},
      {"hand values", hand_values},
      {"filter consistency", filter_consistency},
      {"closure property", closure_property},
      {"smoother properties", smoother_properties},
      {"dual-walk ordering", table_ordering},
      {"yaw alignment", yaw_alignment},
      {"orientation equivalence", orientation_equivalence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failed += o.pass ? 0 : 1;
    std::printf("%zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("9 SKIPPED  recorded-dataset ordering: needs the published recordings (not bundled)\n");
  std::printf("%s: %d of %zu criteria failed\n", failed ? "FAILED" : "OK", failed, criteria.size());
  return failed ? 1 : 0;
}
