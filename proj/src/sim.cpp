#include "pdr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace pdr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxTurn = kPi / 4.0;

double wrap(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

struct Pose {
  Vec2 p;
  double yaw;
};

void turn_to(std::vector<Pose>& poses, double target) {
  const Pose from = poses.back();
  const double delta = wrap(target - from.yaw);
  if (delta == 0.0) return;
  const int n = static_cast<int>(std::ceil(std::abs(delta) / kMaxTurn - 1e-12));
  for (int k = 1; k <= n; ++k) poses.push_back({from.p, from.yaw + delta * k / n});
  poses.back().yaw = from.yaw + delta;
}

std::vector<Pose> footstep_poses(const GaitSpec& spec) {
  const auto& r = spec.route;
  double first_heading = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const Vec2 d = r[i] - r[i - 1];
    if (d.norm() > 0.0) {
      first_heading = std::atan2(d.y(), d.x());
      break;
    }
  }
  std::vector<Pose> poses{{r.front(), first_heading}};
  for (int lap = 0; lap < spec.laps; ++lap) {
    for (std::size_t i = 1; i < r.size(); ++i) {
      const Vec2 d = r[i] - r[i - 1];
      const double len = d.norm();
      if (len == 0.0) continue;
      turn_to(poses, std::atan2(d.y(), d.x()));
      const double heading = poses.back().yaw;
      const int n = std::max(1, static_cast<int>(std::ceil(len / spec.step_length - 1e-9)));
      for (int k = 1; k <= n; ++k)
        poses.push_back({r[i - 1] + d * (static_cast<double>(k) / n), heading});
      poses.back().p = r[i];
    }
  }
  turn_to(poses, first_heading);
  return poses;
}

struct Swing {
  double start;
  Pose from, to;
};

Vec3 foot_point(const Pose& pose, double side, double lateral) {
  const Vec2 normal(-std::sin(pose.yaw), std::cos(pose.yaw));
  const Vec2 xy = pose.p + side * 0.5 * lateral * normal;
  return {xy.x(), xy.y(), 0.0};
}

struct FootState {
  Vec3 p;
  double yaw;
  double pitch;
};

FootState foot_at(double t, const Pose& initial, const std::vector<Swing>& swings, double side,
                  const GaitSpec& spec) {
  // Last swing that started at or before t.
  const auto it = std::upper_bound(swings.begin(), swings.end(), t,
                                   [](double v, const Swing& s) { return v < s.start; });
  if (it == swings.begin()) return {foot_point(initial, side, spec.lateral_offset), initial.yaw, 0.0};
  const Swing& s = *(it - 1);
  const double tau = (t - s.start) / spec.swing_duration;
  if (tau >= 1.0) return {foot_point(s.to, side, spec.lateral_offset), s.to.yaw, 0.0};
  const double sm = tau * tau * tau * (10.0 - 15.0 * tau + 6.0 * tau * tau);
  const Vec3 a = foot_point(s.from, side, spec.lateral_offset);
  const Vec3 b = foot_point(s.to, side, spec.lateral_offset);
  Vec3 p = a + sm * (b - a);
  const double lift = std::sin(kPi * tau);
  p.z() = spec.lift_height * lift * lift;
  const double yaw = s.from.yaw + sm * wrap(s.to.yaw - s.from.yaw);
  const double pitch =
      spec.pitch_amplitude * (std::sin(2.0 * kPi * tau) - 0.5 * std::sin(4.0 * kPi * tau));
  return {p, yaw, pitch};
}

Mat3 orientation(double yaw, double pitch, double mount) {
  const Mat3 R = yaw_rotation(yaw) * Eigen::AngleAxisd(pitch, Vec3::UnitY()).toRotationMatrix() *
                 yaw_rotation(mount);
  return R.transpose();
}

}  // namespace

std::vector<Vec2> l_corridor_route(double a, double b) {
  return {Vec2(0, 0), Vec2(a, 0), Vec2(a, b), Vec2(a, 0), Vec2(0, 0)};
}

std::vector<Vec2> straight_route(double length) { return {Vec2(0, 0), Vec2(length, 0), Vec2(0, 0)}; }

void GaitSpec::validate() const {
  const auto positive = [](double v, const char* what) {
    if (!(std::isfinite(v) && v > 0.0)) throw InputError("sim", std::string(what) + " must be positive");
  };
  positive(step_length, "step_length");
  positive(swing_duration, "swing_duration");
  positive(stance_duration, "stance_duration");
  positive(rest_duration, "rest_duration");
  if (rest_duration < 2.0) throw InputError("sim", "rest_duration must be at least 2 s");
  if (!(sample_rate >= 20.0) || !std::isfinite(sample_rate))
    throw InputError("sim", "sample_rate must be at least 20 Hz");
  for (double v : {lateral_offset, lift_height, noise.sigma_a, noise.sigma_g, noise.bias_a, noise.bias_g})
    if (!(std::isfinite(v) && v >= 0.0))
      throw InputError("sim", "offsets, lift and noise levels must be finite and non-negative");
  if (!std::isfinite(pitch_amplitude) || !std::isfinite(mount_yaw1) || !std::isfinite(mount_yaw2))
    throw InputError("sim", "angles must be finite");
  if (laps < 1) throw InputError("sim", "laps must be >= 1");
  if (first_leg != 1 && first_leg != 2) throw InputError("sim", "first_leg must be 1 or 2");
  if (route.size() < 2) throw InputError("sim", "route needs at least two waypoints");
  double length = 0.0;
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (!route[i].allFinite()) throw InputError("sim", "route waypoints must be finite");
    if (i > 0) length += (route[i] - route[i - 1]).norm();
  }
  if (length < step_length) throw InputError("sim", "route is shorter than one step");
  if (closed_loop && route.front() != route.back())
    throw InputError("sim", "closed-loop walks need the route to end at its first waypoint");
}

const std::vector<std::string>& GaitSpec::keys() {
  static const std::vector<std::string> k = {
      "route",          "laps",           "step_length",   "swing_duration", "stance_duration",
      "rest_duration",  "sample_rate",    "lateral_offset", "lift_height",    "pitch_amplitude_deg",
      "mount_yaw1_deg", "mount_yaw2_deg", "first_leg",     "closed_loop",    "sigma_a",
      "sigma_g",        "bias_a",         "bias_g",        "seed"};
  return k;
}

GaitSpec GaitSpec::from(const KeyValues& kv) {
  if (const auto unknown = kv.unknown_keys(keys()); !unknown.empty())
    throw InputError("sim", "unknown key '" + unknown.front() + "'");
  constexpr double deg = kPi / 180.0;
  GaitSpec s;
  s.route = l_corridor_route();
  if (const auto route = kv.get("route")) {
    // "x,y; x,y; ..."
    s.route.clear();
    for (const auto wp : split(*route, ';')) {
      if (trim(wp).empty()) continue;
      const auto xy = split(wp, ',');
      if (xy.size() != 2) throw InputError("sim", "route waypoints must be 'x,y'");
      s.route.emplace_back(parse_number(xy[0], "route"), parse_number(xy[1], "route"));
    }
  }
  s.laps = static_cast<int>(kv.integer("laps", s.laps));
  s.step_length = kv.number("step_length", s.step_length);
  s.swing_duration = kv.number("swing_duration", s.swing_duration);
  s.stance_duration = kv.number("stance_duration", s.stance_duration);
  s.rest_duration = kv.number("rest_duration", s.rest_duration);
  s.sample_rate = kv.number("sample_rate", s.sample_rate);
  s.lateral_offset = kv.number("lateral_offset", s.lateral_offset);
  s.lift_height = kv.number("lift_height", s.lift_height);
  s.pitch_amplitude = kv.number("pitch_amplitude_deg", s.pitch_amplitude / deg) * deg;
  s.mount_yaw1 = kv.number("mount_yaw1_deg", 0.0) * deg;
  s.mount_yaw2 = kv.number("mount_yaw2_deg", 0.0) * deg;
  s.first_leg = static_cast<int>(kv.integer("first_leg", s.first_leg));
  s.closed_loop = kv.boolean("closed_loop", s.closed_loop);
  s.noise.sigma_a = kv.number("sigma_a", s.noise.sigma_a);
  s.noise.sigma_g = kv.number("sigma_g", s.noise.sigma_g);
  s.noise.bias_a = kv.number("bias_a", s.noise.bias_a);
  s.noise.bias_g = kv.number("bias_g", s.noise.bias_g);
  const long seed = kv.integer("seed", static_cast<long>(s.seed));
  if (seed < 0) throw InputError("sim", "seed must be non-negative");
  s.seed = static_cast<std::uint64_t>(seed);
  s.validate();
  return s;
}

GaitSpec GaitSpec::load(const std::filesystem::path& path) { return from(KeyValues::load(path)); }

Trajectory GroundTruth::leg_frame(int leg) const {
  if (leg != 1 && leg != 2) throw InputError("sim", "leg must be 1 or 2");
  const LegTruth& L = legs[static_cast<std::size_t>(leg - 1)];
  const Mat3 R = yaw_rotation(-L.initial_yaw);
  Trajectory out;
  out.timestamps = t;
  out.points.reserve(L.states.size());
  const Vec3 origin = L.states.front().p;
  for (const auto& s : L.states) out.points.push_back(R * (s.p - origin));
  return out;
}

SimResult generate(const GaitSpec& spec) {
  spec.validate();
  const std::vector<Pose> poses = footstep_poses(spec);
  const std::size_t M = poses.size() - 1;

  // Swing j (1-based) moves the first leg on odd j, the other on even j; one
  // closing swing brings the trailing foot onto the last pose.
  const int first = spec.first_leg - 1;
  std::array<std::vector<Swing>, 2> swings;
  std::array<Pose, 2> at = {poses.front(), poses.front()};
  const double cycle = spec.swing_duration + spec.stance_duration;
  double t_next = spec.rest_duration;
  int last_mover = 1 - first;
  for (std::size_t j = 1; j <= M; ++j) {
    const int leg = (j % 2 == 1) ? first : 1 - first;
    swings[static_cast<std::size_t>(leg)].push_back({t_next, at[static_cast<std::size_t>(leg)], poses[j]});
    at[static_cast<std::size_t>(leg)] = poses[j];
    last_mover = leg;
    t_next += cycle;
  }
  const int trailing = 1 - last_mover;
  swings[static_cast<std::size_t>(trailing)].push_back({t_next, at[static_cast<std::size_t>(trailing)], poses[M]});
  const double t_end = t_next + spec.swing_duration + spec.rest_duration;

  const auto n_samples = static_cast<std::size_t>(std::floor(t_end * spec.sample_rate)) + 1;
  SimResult out;
  out.truth.t.resize(n_samples);
  for (std::size_t n = 0; n < n_samples; ++n)
    out.truth.t[n] = static_cast<double>(n) / spec.sample_rate;
  const auto& t = out.truth.t;
  const Vec3 g = GravityModel{}.g;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&]() { return Vec3(normal(rng), normal(rng), normal(rng)); };

  for (int leg = 0; leg < 2; ++leg) {
    const double side = leg == 0 ? 1.0 : -1.0;
    const double mount = leg == 0 ? spec.mount_yaw1 : spec.mount_yaw2;
    LegTruth& truth = out.truth.legs[static_cast<std::size_t>(leg)];
    truth.states.resize(n_samples);
    for (std::size_t n = 0; n < n_samples; ++n) {
      const FootState fs = foot_at(t[n], poses.front(), swings[static_cast<std::size_t>(leg)], side, spec);
      truth.states[n].p = fs.p;
      truth.states[n].C = orientation(fs.yaw, fs.pitch, mount);
    }
    truth.initial_yaw = poses.front().yaw + mount;
    for (std::size_t n = 0; n + 1 < n_samples; ++n)
      truth.states[n].v = (truth.states[n + 1].p - truth.states[n].p) / (t[n + 1] - t[n]);
    truth.states.back().v.setZero();

    truth.stance.assign(n_samples, 0);
    for (std::size_t n = 0; n < n_samples; ++n) {
      const bool still = truth.states[n].v.isZero(0.0) && (n == 0 || truth.states[n - 1].v.isZero(0.0)) &&
                         (n == 0 || truth.states[n].C == truth.states[n - 1].C);
      truth.stance[n] = still ? 1 : 0;
    }
    for (std::size_t n = 0; n < n_samples;) {
      if (truth.stance[n]) {
        ++n;
        continue;
      }
      std::size_t e = n;
      while (e < n_samples && !truth.stance[e]) ++e;
      truth.swings.push_back({n, e});
      n = e;
    }
    for (std::size_t n = 0; n < n_samples; ++n) {
      truth.v_max = std::max(truth.v_max, truth.states[n].v.norm());
      if (n > 0) truth.path_length += (truth.states[n].p - truth.states[n - 1].p).norm();
    }

    // Increment-exact IMU: the discrete mechanization reproduces the states.
    const Vec3 bias_a = spec.noise.bias_a * draw();
    const Vec3 bias_g = spec.noise.bias_g * draw();
    std::vector<ImuSample> samples(n_samples);
    for (std::size_t n = 0; n < n_samples; ++n) {
      const NavState& x = truth.states[n];
      ImuSample& s = samples[n];
      s.t = t[n];
      if (n == 0) {
        s.f = x.C * (-g);
        s.w.setZero();
      } else {
        const NavState& prev = truth.states[n - 1];
        const double dt = t[n] - t[n - 1];
        s.f = x.C * ((x.v - prev.v) / dt - g);
        const Eigen::AngleAxisd aa(Mat3(x.C * prev.C.transpose()));
        s.w = -aa.angle() * aa.axis() / dt;
      }
      s.f += bias_a + spec.noise.sigma_a * draw();
      s.w += bias_g + spec.noise.sigma_g * draw();
    }
    (leg == 0 ? out.log1 : out.log2) = make_log(std::move(samples));
  }
  return out;
}

}  // namespace pdr
