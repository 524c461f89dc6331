#pragma once

#include <span>
#include <utility>

#include "pdr/core.hpp"
#include "pdr/ingest.hpp"

namespace pdr {

/// Position [m], velocity [m/s] in the navigation frame (ENU) and the
/// orientation matrix C of the body frame relative to the navigation frame:
/// C maps navigation-frame vectors into the body frame, so C^T f rotates a
/// body-frame specific force into the navigation frame.
struct NavState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Mat3 C = Mat3::Identity();
};

struct GravityModel {
  Vec3 g = Vec3(0.0, 0.0, -9.81);

  /// Throws InputError unless |g| lies in [9.7, 9.9] m/s^2 (or allow_any).
  void validate(bool allow_any = false) const;
};

/// The hat operator with the sign convention
///
///   skew(a) = [  0   a3  -a2 ]
///             [ -a3   0   a1 ]
///             [  a2 -a1   0  ]
///
/// NOTE: this is the transpose of the usual cross-product matrix, so
/// skew(a) * b == b x a == -skew(b) * a.
Mat3 skew(const Vec3& a);

/// Rotation matrix for one gyro increment: exp(skew(w * dt)), evaluated in
/// closed form. With this sign, C_n = R_n * C_{n-1} is the discrete Poisson
/// equation dC/dt = skew(w) C. Exactly the identity for a zero increment.
Mat3 incremental_rotation(const Vec3& w, double dt);

/// Nearest rotation matrix (polar decomposition via SVD).
Mat3 orthonormalize(const Mat3& m);

/// One strapdown step: p += v dt; C <- R C; v += (C^T f + g) dt, with the
/// velocity using the freshly rotated C. C is re-orthonormalized.
NavState mechanize_step(const NavState& x, const ImuSample& sample, double dt,
                        const GravityModel& gravity);

/// Quaternion form of the attitude/velocity update. `q` is the Hamilton
/// quaternion of the body-to-navigation rotation (q.toRotationMatrix() == C^T),
/// stored (x, y, z, w). The coefficient vector is propagated with
/// [cos(a) I4 + sin(a)/a * Omega] where a = |w| dt / 2 and Omega is the 4x4
/// rate matrix scaled by dt/2. Velocity uses the previous attitude.
std::pair<Eigen::Quaterniond, Vec3> quaternion_step(const Eigen::Quaterniond& q, const Vec3& v,
                                                    const ImuSample& sample, double dt,
                                                    const GravityModel& gravity);

/// The 4x4 transition applied to the (x, y, z, w) coefficient vector.
Eigen::Matrix4d quaternion_transition(const Vec3& w, double dt);

Eigen::Quaterniond quaternion_from_orientation(const Mat3& C);
Mat3 orientation_from_quaternion(const Eigen::Quaterniond& q);

/// Levels the IMU from averaged rest specific force: p = v = 0, roll/pitch
/// chosen so that C^T f_mean points opposite to gravity, yaw = 0.
/// Throws InputError when | |f_mean| - |g| | > 0.5 m/s^2.
NavState initial_alignment(std::span<const ImuSample> rest_samples, const GravityModel& gravity);

/// Rotation about the navigation z axis by `yaw` [rad] (active, counter-clockwise).
Mat3 yaw_rotation(double yaw);

}  // namespace pdr
