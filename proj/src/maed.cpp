#include "smartjam/maed.hpp"

#include "smartjam/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smartjam {

void MaedConfig::validate() const {
  if (t_max < 1) throw Error(ErrorKind::Config, "MAED: t_max must be >= 1");
  if (!(tau0 > 0.0)) throw Error(ErrorKind::Config, "MAED: tau0 must be > 0");
}

JedResidual jed_residual(const CMat& Y, const CMat& S, bool guarded) {
  JedResidual r;
  r.Y_pinv = Y * (guarded ? pinv_wide_guarded(S) : pinv_wide(S));
  r.E = Y - r.Y_pinv * S;
  return r;
}

double objective(const UnitVec& p, const CMat& S, const CMat& Y) {
  return project_out(p, jed_residual(Y, S).E).squaredNorm();
}

CMat gradient_from(const JedResidual& r, const UnitVec& p) { return -(r.Y_pinv.adjoint() * project_out(p, r.E)); }

CMat gradient(const CMat& S, const UnitVec& p, const CMat& Y) { return gradient_from(jed_residual(Y, S), p); }

CMat prox_box(const CMat& X, const CMat& S_T, double lambda) {
  CMat out(X.rows(), X.cols());
  const Eigen::Index T = S_T.cols();
  out.leftCols(T) = S_T;
  for (Eigen::Index k = T; k < X.cols(); ++k) {
    for (Eigen::Index u = 0; u < X.rows(); ++u) {
      const cplx x = X(u, k);
      out(u, k) = {std::clamp(x.real(), -lambda, lambda), std::clamp(x.imag(), -lambda, lambda)};
    }
  }
  return out;
}

double bb_stepsize(const CMat& dS, const CMat& dG, double tau_prev) {
  const double sg = real_inner(dS, dG);
  const double ss = dS.squaredNorm();
  const double gg = dG.squaredNorm();
  if (!(sg > 0.0) || !(ss > 0.0) || !(gg > 0.0)) return tau_prev;
  const double tau_steepest = ss / sg;
  const double tau_mingrad = sg / gg;
  const double tau = 2.0 * tau_mingrad > tau_steepest ? tau_mingrad : tau_steepest - 0.5 * tau_mingrad;
  if (!(tau > 0.0) || !std::isfinite(tau)) return tau_prev;
  return tau;
}

UnitVec preprocess(const CMat& Y, int U, double gamma_reg_scale) {
  const Eigen::Index B = Y.rows(), K = Y.cols();
  CMat A = Y * Y.adjoint();
  A = 0.5 * (A + A.adjoint());
  A(0, 0) += gamma_reg_scale * static_cast<double>(B) * U * static_cast<double>(K);
  return dominant_eigvec(A);
}

MaedResult run_maed(const CMat& Y, const CMat& S_T, const Constellation& c, const MaedConfig& cfg,
                    const IterationObserver& observer) {
  cfg.validate();
  const Eigen::Index U = S_T.rows(), T = S_T.cols(), K = Y.cols(), D = K - T;
  if (D < 1 || Y.rows() <= U) throw Error(ErrorKind::Shape, "run_maed: inconsistent Y / S_T shapes");

  CMat S = CMat::Zero(U, K);
  S.leftCols(T) = S_T;
  UnitVec p = preprocess(Y, static_cast<int>(U), cfg.gamma_reg_scale);
  double tau = cfg.tau0;
  int stalled_steps = 0;

  JedResidual res = jed_residual(Y, S, true);
  CMat grad = gradient_from(res, p);
  for (int t = 0; t < cfg.t_max; ++t) {
    CMat S_next = prox_box(S - tau * grad, S_T, c.lambda);
    res = jed_residual(Y, S_next, true);
    const PowerStep step = power_iter_step(res.E, p);
    p = step.p;
    stalled_steps += step.stalled;
    CMat grad_next = gradient_from(res, p);
    if (!S_next.allFinite() || !grad_next.allFinite()) {
      throw Error(ErrorKind::Runtime, "run_maed: non-finite iterate at iteration " + std::to_string(t));
    }
    // Step size from the data block only; the pilot block is held fixed by the prox.
    tau = bb_stepsize(S_next.rightCols(D) - S.rightCols(D), grad_next.rightCols(D) - grad.rightCols(D), tau);
    S = std::move(S_next);
    grad = std::move(grad_next);
    if (observer) observer(IterateView{t, S, p, tau, step.stalled});
  }
  return {hard_decide(S.rightCols(D), c), p, stalled_steps};
}

}  // namespace smartjam
