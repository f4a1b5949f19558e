#include "smartjam/somaed.hpp"

#include "smartjam/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace smartjam {

ParameterSet ParameterSet::defaults(int t_max) {
  ParameterSet p;
  p.tau.assign(static_cast<std::size_t>(t_max), 0.1);
  p.gamma.assign(static_cast<std::size_t>(t_max), 0.0);
  p.alpha.assign(static_cast<std::size_t>(t_max), 1.0);
  p.rho.resize(static_cast<std::size_t>(t_max));
  for (int t = 0; t < t_max; ++t) {
    const double frac = t_max > 1 ? static_cast<double>(t) / (t_max - 1) : 0.0;
    p.rho[static_cast<std::size_t>(t)] = std::pow(100.0, frac);
  }
  return p;
}

void ParameterSet::validate() const {
  const std::size_t n = tau.size();
  if (n == 0 || gamma.size() != n || alpha.size() != n || rho.size() != n) {
    throw Error(ErrorKind::Config, "ParameterSet: all weight vectors need the same nonzero length");
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (!std::isfinite(tau[t]) || !std::isfinite(gamma[t]) || !std::isfinite(alpha[t]) || !std::isfinite(rho[t])) {
      throw Error(ErrorKind::Config, "ParameterSet: non-finite weight at iteration " + std::to_string(t));
    }
    if (!(tau[t] > 0.0) || !(rho[t] > 0.0)) {
      throw Error(ErrorKind::Config, "ParameterSet: tau and rho must be positive (iteration " + std::to_string(t) + ")");
    }
  }
}

void llr_numerators(cplx x, const Constellation& c, std::span<double> out) {
  const double lam = c.lambda;
  const double re = x.real(), im = x.imag();
  if (c.kind == ConstellationKind::QPSK) {
    out[0] = 4.0 * lam * re;
    out[1] = 4.0 * lam * im;
    return;
  }
  const double a = 2.0 * lam / 3.0;
  out[0] = a * (4.0 * re + std::abs(re - a) - std::abs(re + a));
  out[1] = (4.0 * lam / 3.0) * (a - std::abs(re));
  out[2] = a * (4.0 * im + std::abs(im - a) - std::abs(im + a));
  out[3] = (4.0 * lam / 3.0) * (a - std::abs(im));
}

std::vector<double> llr(cplx x, double nu, const Constellation& c) {
  if (!(nu > 0.0)) throw Error(ErrorKind::InvalidArgument, "llr: nu must be > 0");
  std::vector<double> out(static_cast<std::size_t>(c.bits_per_symbol));
  llr_numerators(x, c, out);
  for (double& v : out) v /= nu;
  return out;
}

double bit_probability(double llr) {
  const double L = std::clamp(llr, -kLlrClip, kLlrClip);
  const double p = 0.5 * (1.0 + std::tanh(0.5 * L));
  return std::clamp(p, kProbClip, 1.0 - kProbClip);
}

cplx symbol_mean(std::span<const double> probs, const Constellation& c) {
  const double lam = c.lambda;
  if (c.kind == ConstellationKind::QPSK) {
    return {lam * (2.0 * probs[0] - 1.0), lam * (2.0 * probs[1] - 1.0)};
  }
  return {(lam / 3.0) * (2.0 * probs[0] - 1.0) * (3.0 - 2.0 * probs[1]),
          (lam / 3.0) * (2.0 * probs[2] - 1.0) * (3.0 - 2.0 * probs[3])};
}

namespace {

// Demaps the data block of X: fills LLRs and probabilities, returns the symbol means.
CMat soft_demap(const CMat& X, Eigen::Index T, double nu, const Constellation& c, std::vector<double>* llrs,
                std::vector<double>* probs) {
  const Eigen::Index U = X.rows(), D = X.cols() - T;
  const int bps = c.bits_per_symbol;
  CMat S(U, D);
  double num[4];
  double pr[4];
  const double precision = 1.0 / nu;
  for (Eigen::Index u = 0; u < U; ++u) {
    for (Eigen::Index k = 0; k < D; ++k) {
      llr_numerators(X(u, T + k), c, std::span<double>(num, static_cast<std::size_t>(bps)));
      const auto base = static_cast<std::size_t>((u * D + k) * bps);
      for (int i = 0; i < bps; ++i) {
        const double L = num[i] * precision;
        pr[i] = bit_probability(L);
        if (llrs) (*llrs)[base + i] = L;
        if (probs) (*probs)[base + i] = pr[i];
      }
      S(u, k) = symbol_mean(std::span<const double>(pr, static_cast<std::size_t>(bps)), c);
    }
  }
  return S;
}

}  // namespace

CMat pma(const CMat& X, double nu, const CMat& S_T, const Constellation& c) {
  if (!(nu > 0.0)) throw Error(ErrorKind::InvalidArgument, "pma: nu must be > 0");
  const Eigen::Index T = S_T.cols();
  CMat out(X.rows(), X.cols());
  out.leftCols(T) = S_T;
  out.rightCols(X.cols() - T) = soft_demap(X, T, nu, c, nullptr, nullptr);
  return out;
}

SoftDetection run_unfolded(const CMat& Y, const CMat& S_T, const Constellation& c, const UnfoldedConfig& cfg,
                           const IterationObserver& observer) {
  const ParameterSet& prm = cfg.params;
  prm.validate();
  const int t_max = prm.t_max();
  const Eigen::Index U = S_T.rows(), T = S_T.cols(), K = Y.cols(), D = K - T;
  if (D < 1 || Y.rows() <= U) throw Error(ErrorKind::Shape, "run_unfolded: inconsistent Y / S_T shapes");
  const int bps = c.bits_per_symbol;

  CMat S = CMat::Zero(U, K);
  S.leftCols(T) = S_T;
  UnitVec p = preprocess(Y, static_cast<int>(U), cfg.gamma_reg_scale);
  CMat delta = CMat::Zero(U, K);
  double tau = prm.tau[0];

  SoftOutput soft;
  soft.llrs.assign(static_cast<std::size_t>(U * D * bps), 0.0);
  soft.bit_probs.assign(soft.llrs.size(), 0.5);

  JedResidual res = jed_residual(Y, S, true);
  CMat grad = gradient_from(res, p);
  for (int t = 0; t < t_max; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (cfg.step_rule == StepRule::Schedule) tau = prm.tau[ti];
    delta = -tau * grad + prm.gamma[ti] * delta;
    const CMat X = prm.alpha[ti] * (S + delta);
    CMat S_next;
    if (cfg.denoiser == Denoiser::Box) {
      S_next = prox_box(X, S_T, c.lambda);
    } else {
      S_next.resize(U, K);
      S_next.leftCols(T) = S_T;
      const bool last = t + 1 == t_max;
      S_next.rightCols(D) = soft_demap(X, T, 1.0 / prm.rho[ti], c, last ? &soft.llrs : nullptr,
                                       last ? &soft.bit_probs : nullptr);
    }
    res = jed_residual(Y, S_next, true);
    const PowerStep step = power_iter_step(res.E, p);
    p = step.p;
    CMat grad_next = gradient_from(res, p);
    if (!S_next.allFinite() || !grad_next.allFinite()) {
      throw Error(ErrorKind::Runtime, "run_unfolded: non-finite iterate at iteration " + std::to_string(t));
    }
    if (cfg.step_rule == StepRule::BarzilaiBorwein) {
      tau = bb_stepsize(S_next.rightCols(D) - S.rightCols(D), grad_next.rightCols(D) - grad.rightCols(D), tau);
    }
    S = std::move(S_next);
    grad = std::move(grad_next);
    if (observer) observer(IterateView{t, S, p, tau, step.stalled});
  }

  SoftDetection out{{}, {}, p};
  if (cfg.denoiser == Denoiser::Box) {
    out.detection = hard_decide(S.rightCols(D), c);
    return out;
  }
  // Hard decisions by LLR sign; L = 0 maps to bit 0.
  DetectionResult& det = out.detection;
  det.S_hat = S.rightCols(D);
  det.bits.resize(soft.llrs.size());
  det.labels.resize(static_cast<std::size_t>(U * D));
  for (std::size_t s = 0; s < det.labels.size(); ++s) {
    int label = 0;
    for (int i = 0; i < bps; ++i) {
      const std::uint8_t b = soft.llrs[s * bps + i] > 0.0 ? 1 : 0;
      det.bits[s * bps + i] = b;
      label |= b << i;
    }
    det.labels[s] = label;
  }
  det.llrs = soft.llrs;
  soft.S_hat = det.S_hat;
  out.soft = std::move(soft);
  return out;
}

SoftDetection run_somaed(const CMat& Y, const CMat& S_T, const ParameterSet& params, const Constellation& c,
                         const IterationObserver& observer, double gamma_reg_scale) {
  UnfoldedConfig cfg;
  cfg.params = params;
  cfg.gamma_reg_scale = gamma_reg_scale;
  return run_unfolded(Y, S_T, c, cfg, observer);
}

}  // namespace smartjam
