#include "pdr/mechanization.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace pdr {

void GravityModel::validate(bool allow_any) const {
  if (!g.allFinite()) throw InputError("config", "gravity must be finite");
  const double mag = g.norm();
  if (!allow_any && (mag < 9.7 || mag > 9.9))
    throw InputError("config", "gravity magnitude " + std::to_string(mag) + " outside [9.7, 9.9]");
}

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, a.z(), -a.y(),
      -a.z(), 0.0, a.x(),
      a.y(), -a.x(), 0.0;
  return m;
}

Mat3 incremental_rotation(const Vec3& w, double dt) {
  const Vec3 phi = w * dt;
  const double angle = phi.norm();
  const Mat3 k = skew(phi);
  double a;  // sin(angle)/angle
  double b;  // (1 - cos(angle))/angle^2
  if (angle < 1e-6) {
    const double a2 = angle * angle;
    a = 1.0 - a2 / 6.0;
    b = 0.5 - a2 / 24.0;
  } else {
    a = std::sin(angle) / angle;
    b = (1.0 - std::cos(angle)) / (angle * angle);
  }
  return Mat3::Identity() + a * k + b * (k * k);
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

NavState mechanize_step(const NavState& x, const ImuSample& sample, double dt,
                        const GravityModel& gravity) {
  NavState next;
  next.p = x.p + x.v * dt;
  next.C = orthonormalize(incremental_rotation(sample.w, dt) * x.C);
  next.v = x.v + (next.C.transpose() * sample.f + gravity.g) * dt;
  return next;
}

Eigen::Matrix4d quaternion_transition(const Vec3& w, double dt) {
  Eigen::Matrix4d omega;
  omega << 0.0, w.z(), -w.y(), w.x(),
      -w.z(), 0.0, w.x(), w.y(),
      w.y(), -w.x(), 0.0, w.z(),
      -w.x(), -w.y(), -w.z(), 0.0;
  omega *= 0.5 * dt;
  const double alpha = 0.5 * w.norm() * dt;
  const double sinc = alpha == 0.0 ? 1.0 : std::sin(alpha) / alpha;
  return std::cos(alpha) * Eigen::Matrix4d::Identity() + sinc * omega;
}

std::pair<Eigen::Quaterniond, Vec3> quaternion_step(const Eigen::Quaterniond& q, const Vec3& v,
                                                    const ImuSample& sample, double dt,
                                                    const GravityModel& gravity) {
  const Vec3 v_next = v + (q * sample.f + gravity.g) * dt;
  Eigen::Quaterniond q_next;
  q_next.coeffs() = quaternion_transition(sample.w, dt) * q.coeffs();
  q_next.normalize();
  return {q_next, v_next};
}

Eigen::Quaterniond quaternion_from_orientation(const Mat3& C) {
  Eigen::Quaterniond q(Mat3(C.transpose()));
  q.normalize();
  return q;
}

Mat3 orientation_from_quaternion(const Eigen::Quaterniond& q) {
  return q.toRotationMatrix().transpose();
}

NavState initial_alignment(std::span<const ImuSample> rest_samples, const GravityModel& gravity) {
  if (rest_samples.empty()) throw InputError("align", "no rest samples");
  Vec3 mean = Vec3::Zero();
  for (const auto& s : rest_samples) mean += s.f;
  mean /= static_cast<double>(rest_samples.size());
  const double g_mag = gravity.g.norm();
  if (std::abs(mean.norm() - g_mag) > 0.5)
    throw InputError("align", "not at rest / bad scale: mean specific force " +
                                  std::to_string(mean.norm()) + " m/s^2");
  // Body-to-navigation rotation Ry(pitch) * Rx(roll); gravity along -z.
  const double roll = std::atan2(mean.y(), mean.z());
  const double pitch = std::atan2(-mean.x(), std::hypot(mean.y(), mean.z()));
  const Mat3 body_to_nav = (Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                            Eigen::AngleAxisd(roll, Vec3::UnitX()))
                               .toRotationMatrix();
  NavState x;
  x.C = body_to_nav.transpose();
  return x;
}

Mat3 yaw_rotation(double yaw) { return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix(); }

}  // namespace pdr
