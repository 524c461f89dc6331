#include "pdr/filter.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace pdr {

namespace {

bool symmetric_positive_definite(const Eigen::MatrixXd& m) {
  if (!m.allFinite() || (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * m.cwiseAbs().maxCoeff())
    return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

FilterMatrices FilterMatrices::from(const FilterParams& p) {
  FilterMatrices m;
  m.Q.setZero();
  m.Q.topLeftCorner<3, 3>() = p.sigma_a * p.sigma_a * Mat3::Identity();
  m.Q.bottomRightCorner<3, 3>() = p.sigma_g * p.sigma_g * Mat3::Identity();
  m.R_vel = p.r_vel * p.r_vel * Mat3::Identity();
  m.R_pos_vel.setZero();
  m.R_pos_vel.topLeftCorner<3, 3>() = p.r_pos * p.r_pos * Mat3::Identity();
  m.R_pos_vel.bottomRightCorner<3, 3>() = p.r_pos_vel * p.r_pos_vel * Mat3::Identity();
  m.R_dual = std::isinf(p.r_dual) ? Mat2(Mat2::Identity() * std::numeric_limits<double>::infinity())
                                  : Mat2(p.r_dual * p.r_dual * Mat2::Identity());
  m.P0 = initial_covariance(p);
  return m;
}

void FilterMatrices::validate() const {
  if (!symmetric_positive_definite(Q)) throw InputError("config", "Q must be symmetric positive definite");
  if (!symmetric_positive_definite(R_vel)) throw InputError("config", "R_vel must be symmetric positive definite");
  if (!symmetric_positive_definite(R_pos_vel))
    throw InputError("config", "R_pos_vel must be symmetric positive definite");
  if (dual_enabled() && !symmetric_positive_definite(R_dual))
    throw InputError("config", "R_dual must be symmetric positive definite");
  if (!symmetric_positive_definite(P0)) throw InputError("config", "P0 must be symmetric positive definite");
}

Eigen::Matrix<double, 3, 9> FilterMatrices::H_vel() {
  Eigen::Matrix<double, 3, 9> h = Eigen::Matrix<double, 3, 9>::Zero();
  h.block<3, 3>(0, kVel).setIdentity();
  return h;
}

Eigen::Matrix<double, 6, 9> FilterMatrices::H_pos_vel() {
  Eigen::Matrix<double, 6, 9> h = Eigen::Matrix<double, 6, 9>::Zero();
  h.block<3, 3>(0, kPos).setIdentity();
  h.block<3, 3>(3, kVel).setIdentity();
  return h;
}

Eigen::Matrix<double, 2, 9> FilterMatrices::H_horizontal() {
  Eigen::Matrix<double, 2, 9> h = Eigen::Matrix<double, 2, 9>::Zero();
  h(0, kPos) = 1.0;
  h(1, kPos + 1) = 1.0;
  return h;
}

Mat9 initial_covariance(const FilterParams& p) {
  Vec9 d;
  d << Vec3::Constant(p.p0_pos * p.p0_pos), Vec3::Constant(p.p0_vel * p.p0_vel),
      p.p0_tilt * p.p0_tilt, p.p0_tilt * p.p0_tilt, p.p0_yaw * p.p0_yaw;
  return d.asDiagonal();
}

Mat9 Transition::matrix() const {
  Mat9 F = Mat9::Identity();
  F.block<3, 3>(kPos, kVel) = dt * Mat3::Identity();
  F.block<3, 3>(kVel, kAtt) = v_beta;
  return F;
}

Vec9 Transition::apply(const Vec9& x) const {
  Vec9 y = x;
  y.segment<3>(kPos) += dt * x.segment<3>(kVel);
  y.segment<3>(kVel) += v_beta * x.segment<3>(kAtt);
  return y;
}

Transition build_transition(const Mat3& C_est, const Vec3& f_meas, double dt) {
  return {dt, -skew(C_est.transpose() * f_meas) * dt};
}

Mat9 build_F(const Mat3& C_est, const Vec3& f_meas, double dt) {
  return build_transition(C_est, f_meas, dt).matrix();
}

Eigen::Matrix<double, 9, 6> build_G(const Mat3& C_est, double dt) {
  Eigen::Matrix<double, 9, 6> G = Eigen::Matrix<double, 9, 6>::Zero();
  G.block<3, 3>(kVel, 0) = C_est.transpose() * dt;
  G.block<3, 3>(kAtt, 3) = -C_est.transpose() * dt;
  return G;
}

void FilterTrace::reserve(std::size_t n) {
  t.reserve(n);
  nav.reserve(n);
  dx.reserve(n);
  P.reserve(n);
  dx_pred.reserve(n);
  P_pred.reserve(n);
  transition.reserve(n);
  update.reserve(n);
}

Transition predict(FilterState& state, const ImuSample& sample, double dt,
                   const FilterMatrices& mats, const GravityModel& gravity) {
  state.nav = mechanize_step(state.nav, sample, dt, gravity);
  const Transition tr = build_transition(state.nav.C, sample.f, dt);
  const Mat9 F = tr.matrix();
  const auto G = build_G(state.nav.C, dt);
  state.dx = tr.apply(state.dx);
  state.P = F * state.P * F.transpose() + G * mats.Q * G.transpose();
  state.P = 0.5 * (state.P + state.P.transpose()).eval();
  return tr;
}

void update_zero_velocity(FilterState& state, const FilterMatrices& mats) {
  const Vec3 y = -(state.nav.v + state.dx.segment<3>(kVel));
  measurement_update<3>(state, FilterMatrices::H_vel(), y, mats.R_vel);
}

int update_standstill(FilterState& state, const FilterMatrices& mats) {
  Vec6 y;
  y << -(state.nav.p + state.dx.segment<3>(kPos)), -(state.nav.v + state.dx.segment<3>(kVel));
  const auto H = FilterMatrices::H_pos_vel();
  const Eigen::Matrix<double, 6, 9> HP = H * state.P;
  const Mat6 HPHt = HP * H.transpose();
  // A large closure error would otherwise be absorbed as one big rotation;
  // spread it over the following standstill epochs instead.
  Mat6 R = mats.R_pos_vel;
  int inflations = 0;
  for (; inflations < 64; ++inflations) {
    const Eigen::Matrix<double, 6, 9> KT = Mat6(HPHt + R).ldlt().solve(HP);
    if ((KT.transpose() * y).segment<3>(kAtt).norm() <= kMaxAttitudeStep) break;
    R *= 4.0;
  }
  measurement_update<6>(state, H, y, R);
  return inflations;
}

void update_horizontal(FilterState& state, const Vec2& anchor, const FilterMatrices& mats) {
  const Vec2 y = anchor - (state.nav.p.head<2>() + state.dx.segment<2>(kPos));
  measurement_update<2>(state, FilterMatrices::H_horizontal(), y, mats.R_dual);
}

Mat3 apply_attitude_correction(const Mat3& C, const Vec3& beta) {
  return orthonormalize(C * (Mat3::Identity() + skew(beta)).transpose());
}

void fold_attitude(FilterState& state, std::size_t epoch, const char* stage) {
  const Vec3 beta = state.dx.segment<3>(kAtt);
  if (!beta.allFinite() || beta.norm() >= 0.5)
    throw DivergenceError(stage, epoch, "attitude error estimate too large (" +
                                            std::to_string(beta.norm()) + " rad)");
  state.nav.C = apply_attitude_correction(state.nav.C, beta);
  state.dx.segment<3>(kAtt).setZero();
}

void check_covariance(const Mat9& P, std::size_t epoch, const char* stage) {
  if (!P.allFinite()) throw DivergenceError(stage, epoch, "covariance not finite");
  const double tr = P.trace();
  Eigen::SelfAdjointEigenSolver<Mat9> es(P, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues()(0);
  if (min_eig < -1e-10 * std::abs(tr))
    throw DivergenceError(stage, epoch,
                          "covariance lost positive semi-definiteness (min eigenvalue " +
                              std::to_string(min_eig) + ")");
}

namespace {

void record(FilterTrace& trace, double t, const FilterState& state, const Vec9& dx_pred,
            const Mat9& P_pred, const Transition& tr, UpdateKind kind) {
  trace.t.push_back(t);
  trace.nav.push_back(state.nav);
  trace.dx.push_back(state.dx);
  trace.P.push_back(state.P);
  trace.dx_pred.push_back(dx_pred);
  trace.P_pred.push_back(P_pred);
  trace.transition.push_back(tr);
  trace.update.push_back(kind);
}

void check_inputs(const ImuLog& log, const ZuptMask& mask) {
  if (mask.size() != log.size())
    throw InputError("filter", "mask length " + std::to_string(mask.size()) +
                                   " does not match log length " + std::to_string(log.size()));
}

}  // namespace

FilterState start_trace(FilterTrace& trace, const ImuLog& log, const NavState& init,
                        const FilterMatrices& mats) {
  FilterState state{init, Vec9::Zero(), mats.P0};
  trace.reserve(log.size());
  record(trace, log[0].t, state, state.dx, state.P, Transition{}, UpdateKind::none);
  return state;
}

FilterTrace kf_zupt_run(const ImuLog& log, const ZuptMask& mask, const NavState& init,
                        const FilterMatrices& mats, const GravityModel& gravity) {
  check_inputs(log, mask);
  FilterTrace trace;
  FilterState state = start_trace(trace, log, init, mats);
  for (std::size_t n = 1; n < log.size(); ++n) {
    const Transition tr = predict(state, log[n], log.dt(n), mats, gravity);
    const Vec9 dx_pred = state.dx;
    const Mat9 P_pred = state.P;
    UpdateKind kind = UpdateKind::none;
    if (mask[n]) {
      update_zero_velocity(state, mats);
      state.nav.p += state.dx.segment<3>(kPos);
      state.nav.v += state.dx.segment<3>(kVel);
      fold_attitude(state, n, "filter");
      state.dx.setZero();
      kind = UpdateKind::velocity;
      check_covariance(state.P, n, "filter");
    }
    record(trace, log[n].t, state, dx_pred, P_pred, tr, kind);
  }
  return trace;
}

void forward_step(FilterState& state, FilterTrace& trace, std::size_t n, const ImuLog& log,
                  const ZuptMask& mask, const RestIntervals& rest, const FilterMatrices& mats,
                  const GravityModel& gravity, const ForwardOptions& options, const Vec2* anchor) {
  const Transition tr = predict(state, log[n], log.dt(n), mats, gravity);
  const Vec9 dx_pred = state.dx;
  const Mat9 P_pred = state.P;
  UpdateKind kind = UpdateKind::none;
  if (mask[n]) {
    if (options.use_standstill_position && standstill(n, rest)) {
      if (update_standstill(state, mats) > 0) ++trace.damped;
      kind = UpdateKind::position_velocity;
    } else {
      update_zero_velocity(state, mats);
      kind = UpdateKind::velocity;
    }
  }
  // An infinite R_dual skips the update entirely so disabled runs stay bit-exact.
  if (anchor != nullptr && mats.dual_enabled()) {
    update_horizontal(state, *anchor, mats);
    if (kind == UpdateKind::none) kind = UpdateKind::horizontal;
  }
  if (kind != UpdateKind::none) {
    if (options.fold_attitude) fold_attitude(state, n, "filter");
    check_covariance(state.P, n, "filter");
  }
  record(trace, log[n].t, state, dx_pred, P_pred, tr, kind);
}

FilterTrace kf_closed_loop_forward(const ImuLog& log, const ZuptMask& mask,
                                   const RestIntervals& rest, const NavState& init,
                                   const FilterMatrices& mats, const GravityModel& gravity,
                                   const ForwardOptions& options) {
  check_inputs(log, mask);
  FilterTrace trace;
  FilterState state = start_trace(trace, log, init, mats);
  for (std::size_t n = 1; n < log.size(); ++n)
    forward_step(state, trace, n, log, mask, rest, mats, gravity, options);
  return trace;
}

}  // namespace pdr
