#include <doctest.h>

#include <numbers>
#include <random>

#include "pdr/mechanization.hpp"

using namespace pdr;

namespace {

Vec3 random_vec(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng), n(rng)};
}

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("skew follows the transposed convention") {
  CHECK(skew(Vec3::Zero()) == Mat3::Zero());
  Mat3 expected;
  expected << 0, 3, -2, -3, 0, 1, 2, -1, 0;
  CHECK(skew(Vec3(1, 2, 3)) == expected);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 a = random_vec(rng, 1.0), b = random_vec(rng, 1.0);
    CHECK((skew(a) * b + skew(b) * a).norm() < 1e-14);
    CHECK((skew(a) * b - b.cross(a)).norm() < 1e-14);
  }
}

TEST_CASE("incremental rotation") {
  CHECK(incremental_rotation(Vec3::Zero(), 0.01) == Mat3::Identity());

  // With C_n = R C_{n-1} propagating nav->body, a positive z rate turns the
  // body axes counter-clockwise, so the nav->body matrix turns clockwise.
  Mat3 quarter;
  quarter << 0, 1, 0, -1, 0, 0, 0, 0, 1;
  CHECK(max_abs(incremental_rotation(Vec3(0, 0, std::numbers::pi / 2), 1.0) - quarter) < 1e-15);

  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const Mat3 R = incremental_rotation(random_vec(rng, 3.0), 0.3);
    CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs(R.transpose() * R - Mat3::Identity()) < 1e-12);
  }
  // Series branch is continuous with the closed form.
  const Vec3 w(1e-7, -2e-7, 3e-7);
  const Mat3 small = incremental_rotation(w, 1.0);
  CHECK(max_abs(small - (Mat3::Identity() + skew(w))) < 1e-13);
}

TEST_CASE("mechanize step") {
  const GravityModel g;
  NavState x;
  x.p = Vec3(1, 2, 3);
  x.v = Vec3(0.5, 0, 0);
  ImuSample s;
  s.f = -g.g;
  const NavState y = mechanize_step(x, s, 0.01, g);
  CHECK((y.v - x.v).norm() < 1e-15);
  CHECK((y.p - (x.p + x.v * 0.01)).norm() < 1e-15);

  // Free fall: v_k = g k dt, p_k = g dt^2 k (k - 1) / 2.
  NavState z;
  const double dt = 0.01;
  const int k = 250;
  for (int i = 0; i < k; ++i) z = mechanize_step(z, ImuSample{}, dt, g);
  CHECK((z.v - g.g * k * dt).norm() < 1e-12);
  CHECK((z.p - g.g * dt * dt * k * (k - 1) / 2.0).norm() < 1e-12);
}

TEST_CASE("perfect gravity cancellation keeps the IMU still") {
  const GravityModel g;
  std::mt19937_64 rng(3);
  NavState x;
  const double dt = 0.01;
  for (int n = 0; n < 10000; ++n) {
    ImuSample s;
    s.w = random_vec(rng, 2.0);
    const Mat3 C_next = orthonormalize(incremental_rotation(s.w, dt) * x.C);
    s.f = -C_next * g.g;
    x = mechanize_step(x, s, dt, g);
    CHECK(max_abs(x.C.transpose() * x.C - Mat3::Identity()) < 1e-9);
  }
  CHECK(x.v.norm() < 1e-9);
  CHECK(x.p.norm() < 1e-9);
  CHECK(x.C.determinant() > 0.0);
}

TEST_CASE("matrix and quaternion propagation agree") {
  const GravityModel g;
  std::mt19937_64 rng(4);
  for (int run = 0; run < 20; ++run) {
    NavState x;
    x.C = incremental_rotation(random_vec(rng, 1.0), 1.0);
    Eigen::Quaterniond q = quaternion_from_orientation(x.C);
    Vec3 v = Vec3::Zero();
    for (int n = 0; n < 100; ++n) {
      ImuSample s;
      s.w = random_vec(rng, 3.0);
      s.f = random_vec(rng, 10.0);
      x = mechanize_step(x, s, 0.01, g);
      std::tie(q, v) = quaternion_step(q, v, s, 0.01, g);
      CHECK(std::abs(q.norm() - 1.0) < 1e-12);
    }
    CHECK(max_abs(x.C - orientation_from_quaternion(q)) < 1e-9);
  }
}

TEST_CASE("quaternion step limits") {
  const GravityModel g;
  const Eigen::Quaterniond q(Eigen::AngleAxisd(0.3, Vec3(1, 2, 3).normalized()));
  ImuSample s;
  s.f = orientation_from_quaternion(q) * -g.g;
  const auto [q1, v1] = quaternion_step(q, Vec3::Zero(), s, 0.01, g);
  CHECK(q1.coeffs() == q.normalized().coeffs());
  CHECK(v1.norm() < 1e-14);
  CHECK(quaternion_transition(Vec3::Zero(), 0.01) == Eigen::Matrix4d::Identity());

  const Mat3 C = incremental_rotation(Vec3(0.2, -0.4, 1.1), 1.0);
  CHECK(max_abs(orientation_from_quaternion(quaternion_from_orientation(C)) - C) < 1e-14);
}

TEST_CASE("initial alignment") {
  const GravityModel g;
  std::vector<ImuSample> rest(50);
  for (auto& s : rest) s.f = Vec3(0, 0, 9.81);
  const NavState level = initial_alignment(rest, g);
  CHECK(max_abs(level.C - Mat3::Identity()) < 1e-15);
  CHECK(level.p == Vec3::Zero());
  CHECK(level.v == Vec3::Zero());

  const Mat3 tilt = Eigen::AngleAxisd(10.0 * std::numbers::pi / 180.0, Vec3::UnitX()).toRotationMatrix() *
                    Eigen::AngleAxisd(-4.0 * std::numbers::pi / 180.0, Vec3::UnitY()).toRotationMatrix();
  for (auto& s : rest) s.f = tilt * Vec3(0, 0, 9.81);
  const NavState tilted = initial_alignment(rest, g);
  CHECK((tilted.C.transpose() * rest[0].f + g.g).norm() < 1e-6);
  // Yaw stays zero: the body x axis has no component along nav y.
  CHECK(std::abs(tilted.C.transpose()(1, 0)) < 1e-12);

  for (auto& s : rest) s.f = Vec3(0, 0, 5);
  CHECK_THROWS_AS(initial_alignment(rest, g), InputError);
  CHECK_THROWS_AS(initial_alignment({}, g), InputError);
}

TEST_CASE("gravity model range") {
  CHECK_NOTHROW(GravityModel{}.validate());
  CHECK_THROWS_AS(GravityModel{Vec3(0, 0, -1.62)}.validate(), InputError);
  CHECK_NOTHROW(GravityModel{Vec3(0, 0, -1.62)}.validate(true));
}

TEST_CASE("yaw rotation is counter-clockwise") {
  const Vec3 r = yaw_rotation(std::numbers::pi / 2) * Vec3::UnitX();
  CHECK((r - Vec3::UnitY()).norm() < 1e-15);
}
