#pragma once

#include "smartjam/detection.hpp"
#include "smartjam/maed.hpp"
#include "smartjam/numerics.hpp"
#include "smartjam/scenario.hpp"

#include <span>
#include <vector>

namespace smartjam {

/// Per-iteration SO-MAED weights.
struct ParameterSet {
  std::vector<double> tau;    // gradient step size
  std::vector<double> gamma;  // momentum weight
  std::vector<double> alpha;  // output scale
  std::vector<double> rho;    // error precision 1 / nu

  int t_max() const { return static_cast<int>(tau.size()); }

  /// Untrained initialization: tau = 0.1, gamma = 0, alpha = 1 and rho rising
  /// geometrically from 1 to 100.
  static ParameterSet defaults(int t_max);

  /// Throws Config unless all vectors have equal length >= 1, tau > 0, rho > 0, all finite.
  void validate() const;
};

inline constexpr double kLlrClip = 80.0;
inline constexpr double kProbClip = 1e-12;

/// Max-log LLR numerators l(x) (exact for QPSK); out must hold bits_per_symbol values.
void llr_numerators(cplx x, const Constellation& c, std::span<double> out);

/// LLRs l(x) / nu.
std::vector<double> llr(cplx x, double nu, const Constellation& c);

/// 1/2 (1 + tanh(L/2)) with L clipped to +-80 and the result to [1e-12, 1 - 1e-12].
double bit_probability(double llr);

/// Symbol mean of independent bits with P(b_i = 1) = probs[i].
cplx symbol_mean(std::span<const double> probs, const Constellation& c);

/// Posterior-mean approximation: pilot columns become S_T, data entries the
/// symbol mean under an additive CN(0, nu) error model.
CMat pma(const CMat& X, double nu, const CMat& S_T, const Constellation& c);

/// Layout of llrs and bit_probs: [(u * D + k) * bps + i].
struct SoftOutput {
  std::vector<double> llrs;
  std::vector<double> bit_probs;
  CMat S_hat;
};

struct SoftDetection {
  DetectionResult detection;  // hard bits by LLR sign (L = 0 -> bit 0)
  SoftOutput soft;
  UnitVec p;
};

/// Generalized unfolded iteration shared by MAED-like and SO-MAED-like variants:
///   grad = gradient(S, p)
///   Delta = -tau grad + gamma Delta_prev
///   S = denoise(alpha (S + Delta))
///   p = power step on the new residual
enum class Denoiser { Pma, Box };
enum class StepRule { Schedule, BarzilaiBorwein };

struct UnfoldedConfig {
  Denoiser denoiser = Denoiser::Pma;
  StepRule step_rule = StepRule::Schedule;
  ParameterSet params;  // tau is only read at t = 0 under BarzilaiBorwein
  double gamma_reg_scale = 0.1;
};

SoftDetection run_unfolded(const CMat& Y, const CMat& S_T, const Constellation& c, const UnfoldedConfig& cfg,
                           const IterationObserver& observer = {});

/// SO-MAED with the given trained (or default) parameters.
SoftDetection run_somaed(const CMat& Y, const CMat& S_T, const ParameterSet& params, const Constellation& c,
                         const IterationObserver& observer = {}, double gamma_reg_scale = 0.1);

}  // namespace smartjam
