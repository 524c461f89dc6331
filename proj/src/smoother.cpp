#include "pdr/smoother.hpp"

namespace pdr {

SmoothedTrace rts_smooth(const FilterTrace& trace, const SmootherOptions& options) {
  const std::size_t n_epochs = trace.size();
  SmoothedTrace out;
  if (n_epochs == 0) return out;
  out.dx.resize(n_epochs);
  if (options.keep_covariance) out.P.resize(n_epochs);

  Vec9 dx_next = trace.dx.back();
  Mat9 P_next = trace.P.back();
  out.dx.back() = dx_next;
  if (options.keep_covariance) out.P.back() = P_next;

  for (std::size_t k = n_epochs - 1; k-- > 0;) {
    const Mat9& P_filt = trace.P[k];
    const Mat9& P_pred = trace.P_pred[k + 1];
    const Mat9 F = trace.transition[k + 1].matrix();
    // A^T = P_pred^-1 F P_filt (both covariances symmetric).
    const Mat9 FP = F * P_filt;
    Eigen::LLT<Mat9> llt(P_pred);
    Mat9 AT;
    if (llt.info() == Eigen::Success) {
      AT = llt.solve(FP);
    } else {
      const double lambda = 1e-12 * P_pred.trace();
      AT = Mat9(P_pred + lambda * Mat9::Identity()).ldlt().solve(FP);
      ++out.regularized;
    }
    const Mat9 A = AT.transpose();
    const Vec9 dx = trace.dx[k] + A * (dx_next - trace.dx_pred[k + 1]);
    Mat9 P = P_filt + A * (P_next - P_pred) * AT;
    P = 0.5 * (P + P.transpose()).eval();
    out.dx[k] = dx;
    if (options.keep_covariance) out.P[k] = P;
    dx_next = dx;
    P_next = P;
  }
  if (out.regularized > 0)
    out.warnings.push_back("smoother: predicted covariance regularized at " +
                           std::to_string(out.regularized) + " epochs");
  return out;
}

std::vector<NavState> compensate_states(const FilterTrace& trace, const SmoothedTrace& smoothed) {
  if (trace.size() != smoothed.size())
    throw InputError("smooth", "trace and smoothed trace differ in length");
  std::vector<NavState> out(trace.size());
  for (std::size_t n = 0; n < trace.size(); ++n) {
    const Vec9& dx = smoothed.dx[n];
    NavState x = trace.nav[n];
    x.p += dx.segment<3>(kPos);
    x.v += dx.segment<3>(kVel);
    const Vec3 beta = dx.segment<3>(kAtt);
    if (!beta.isZero(0.0)) x.C = apply_attitude_correction(x.C, beta);
    out[n] = x;
  }
  return out;
}

Trajectory compensate_trajectory(const FilterTrace& trace, const SmoothedTrace& smoothed) {
  if (trace.size() != smoothed.size())
    throw InputError("smooth", "trace and smoothed trace differ in length");
  Trajectory traj;
  traj.points.resize(trace.size());
  for (std::size_t n = 0; n < trace.size(); ++n)
    traj.points[n] = trace.nav[n].p + smoothed.dx[n].segment<3>(kPos);
  traj.timestamps = trace.t;
  return traj;
}

Trajectory nominal_trajectory(const FilterTrace& trace) {
  Trajectory traj;
  traj.points.reserve(trace.size());
  for (const auto& x : trace.nav) traj.points.push_back(x.p);
  traj.timestamps = trace.t;
  return traj;
}

}  // namespace pdr
