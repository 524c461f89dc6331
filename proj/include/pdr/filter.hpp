#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "pdr/core.hpp"
#include "pdr/ingest.hpp"
#include "pdr/mechanization.hpp"
#include "pdr/zvd.hpp"

namespace pdr {

// Error-state layout: [dp(0..2) dv(3..5) beta(6..8)], defined as
// true minus computed. beta is the small navigation-frame rotation with
// C_true^T ~ (I + skew(beta)) C_est^T.
inline constexpr int kPos = 0;
inline constexpr int kVel = 3;
inline constexpr int kAtt = 6;

struct ErrorState {
  Vec3 dp = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
  Vec3 beta = Vec3::Zero();

  static ErrorState from(const Vec9& x) {
    return {x.segment<3>(kPos), x.segment<3>(kVel), x.segment<3>(kAtt)};
  }
  [[nodiscard]] Vec9 vector() const {
    Vec9 x;
    x << dp, dv, beta;
    return x;
  }
};

/// Noise levels behind FilterMatrices. Standard deviations throughout.
struct FilterParams {
  double sigma_a = 0.02;    // accelerometer, per sample [m/s^2]
  double sigma_g = 0.002;   // gyro, per sample [rad/s]
  double r_vel = 0.01;      // zero-velocity pseudo-measurement [m/s]
  double r_pos = 0.01;      // standstill position observation [m]
  double r_pos_vel = 0.01;  // standstill velocity observation [m/s]
  double r_dual = 0.3;      // mid-step horizontal position tie [m]; inf disables
  double p0_pos = 1e-5;
  double p0_vel = 1e-3;
  double p0_tilt = 0.01;    // rad
  double p0_yaw = 1e-4;     // rad
};

struct FilterMatrices {
  Mat6 Q = Mat6::Identity();
  Mat3 R_vel = Mat3::Identity();       // velocity-only zero-velocity update
  Mat6 R_pos_vel = Mat6::Identity();   // position + velocity at standstill
  Mat2 R_dual = Mat2::Identity();      // horizontal position tie between legs
  Mat9 P0 = Mat9::Identity();

  static FilterMatrices from(const FilterParams& params);
  /// Throws InputError unless Q, R_vel, R_pos_vel, P0 are symmetric positive
  /// definite (R_dual may be infinite).
  void validate() const;
  [[nodiscard]] bool dual_enabled() const { return std::isfinite(R_dual(0, 0)); }

  static Eigen::Matrix<double, 3, 9> H_vel();
  static Eigen::Matrix<double, 6, 9> H_pos_vel();
  static Eigen::Matrix<double, 2, 9> H_horizontal();
};

/// The varying part of the transition matrix: dt and the -skew(C^T f) dt block.
struct Transition {
  double dt = 0.0;
  Mat3 v_beta = Mat3::Zero();

  [[nodiscard]] Mat9 matrix() const;
  [[nodiscard]] Vec9 apply(const Vec9& x) const;
};

/// Linearized error dynamics:
///   [ I  I dt  0                 ]
///   [ 0  I    -skew(C^T f) dt    ]
///   [ 0  0     I                 ]
Mat9 build_F(const Mat3& C_est, const Vec3& f_meas, double dt);
Transition build_transition(const Mat3& C_est, const Vec3& f_meas, double dt);
/// Process-noise mapping [0 0; C^T dt 0; 0 -C^T dt] for [df; dw].
Eigen::Matrix<double, 9, 6> build_G(const Mat3& C_est, double dt);

enum class UpdateKind : std::uint8_t { none = 0, velocity = 1, position_velocity = 2, horizontal = 3 };

/// Everything the smoother needs, per epoch. Epoch 0 holds the initial state
/// (predicted == filtered, no update). transition[n] propagated n-1 -> n.
struct FilterTrace {
  std::vector<double> t;
  std::vector<NavState> nav;
  std::vector<Vec9> dx;
  std::vector<Mat9> P;
  std::vector<Vec9> dx_pred;
  std::vector<Mat9> P_pred;
  std::vector<Transition> transition;
  std::vector<UpdateKind> update;
  std::size_t damped = 0;  // standstill updates applied with inflated R

  [[nodiscard]] std::size_t size() const { return nav.size(); }
  void reserve(std::size_t n);
};

/// Working state of one filter recursion.
struct FilterState {
  NavState nav;
  Vec9 dx = Vec9::Zero();
  Mat9 P = Mat9::Identity();
};

/// Time update: mechanize, dx <- F dx, P <- F P F^T + G Q G^T.
Transition predict(FilterState& state, const ImuSample& sample, double dt,
                   const FilterMatrices& mats, const GravityModel& gravity);

/// Generic linear measurement update on the error state with innovation y
/// (already formed as z - H dx). Covariance uses the simple form (I - K H) P,
/// then symmetrized.
template <int M>
void measurement_update(FilterState& state, const Eigen::Matrix<double, M, 9>& H,
                        const Eigen::Matrix<double, M, 1>& innovation,
                        const Eigen::Matrix<double, M, M>& R) {
  const Eigen::Matrix<double, M, M> S = H * state.P * H.transpose() + R;
  // K = P H^T S^-1, via S^-1 (H P) since S and P are symmetric.
  const Eigen::Matrix<double, M, 9> KT = S.ldlt().solve(H * state.P);
  const Eigen::Matrix<double, 9, M> K = KT.transpose();
  state.dx += K * innovation;
  state.P = (Mat9::Identity() - K * H) * state.P;
  state.P = 0.5 * (state.P + state.P.transpose()).eval();
}

/// Zero-velocity pseudo-measurement (true v = 0).
void update_zero_velocity(FilterState& state, const FilterMatrices& mats);
/// Largest attitude correction a single standstill update may apply [rad].
inline constexpr double kMaxAttitudeStep = 0.1;

/// Standstill: true p = 0 and v = 0. When the attitude part of the correction
/// would exceed kMaxAttitudeStep, R is inflated by powers of 4 until it does
/// not; returns the number of inflations (0 for an ordinary update).
int update_standstill(FilterState& state, const FilterMatrices& mats);
/// Ties the horizontal position to `anchor` (the other foot).
void update_horizontal(FilterState& state, const Vec2& anchor, const FilterMatrices& mats);

/// C^T <- (I + skew(beta)) C^T, re-orthonormalized.
Mat3 apply_attitude_correction(const Mat3& C, const Vec3& beta);
/// Folds beta into C and zeroes it. Throws DivergenceError when |beta| >= 0.5.
void fold_attitude(FilterState& state, std::size_t epoch, const char* stage);

/// Throws DivergenceError unless P is finite and its smallest eigenvalue is
/// >= -1e-10 * trace(P).
void check_covariance(const Mat9& P, std::size_t epoch, const char* stage);

Mat9 initial_covariance(const FilterParams& params);

/// ZUPT-aided filter with full feedback: every masked epoch applies v = 0,
/// folds dp, dv into the nominal state and beta into C, then zeroes the error.
FilterTrace kf_zupt_run(const ImuLog& log, const ZuptMask& mask, const NavState& init,
                        const FilterMatrices& mats, const GravityModel& gravity = {});

struct ForwardOptions {
  bool use_standstill_position = true;  // p = 0 observations in head/tail rest
  bool fold_attitude = true;            // in-loop angle compensation
};

/// Closure-aware forward pass: standstill epochs observe p = 0, v = 0; other
/// masked epochs observe v = 0. Only beta is folded into C; dp, dv stay in the
/// error state for the smoother.
FilterTrace kf_closed_loop_forward(const ImuLog& log, const ZuptMask& mask,
                                   const RestIntervals& rest, const NavState& init,
                                   const FilterMatrices& mats, const GravityModel& gravity = {},
                                   const ForwardOptions& options = {});

/// One epoch of the closure-aware pass (shared with the dual-leg filter).
/// Predicts to epoch n, applies the masked update and appends to `trace`.
/// A non-null `anchor` adds the horizontal position tie (skipped when R_dual
/// is infinite).
void forward_step(FilterState& state, FilterTrace& trace, std::size_t n, const ImuLog& log,
                  const ZuptMask& mask, const RestIntervals& rest, const FilterMatrices& mats,
                  const GravityModel& gravity, const ForwardOptions& options,
                  const Vec2* anchor = nullptr);

/// Starts a trace at epoch 0 and returns the matching filter state.
FilterState start_trace(FilterTrace& trace, const ImuLog& log, const NavState& init,
                        const FilterMatrices& mats);

}  // namespace pdr
