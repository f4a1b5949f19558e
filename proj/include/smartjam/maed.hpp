#pragma once

#include "smartjam/detection.hpp"
#include "smartjam/numerics.hpp"
#include "smartjam/scenario.hpp"

#include <functional>

namespace smartjam {

struct MaedConfig {
  int t_max = 20;  // 30 for strongly correlated (imported mmWave) channels
  double tau0 = 0.1;
  double gamma_reg_scale = 0.1;  // Gamma(0,0) = gamma_reg_scale * B * U * K

  void validate() const;
};

/// Pieces of the JED residual for a fixed symbol matrix S (U x K):
/// Y pinv(S) (B x U) and E = Y (I - pinv(S) S) (B x K).
struct JedResidual {
  CMat Y_pinv;
  CMat E;
};

/// Strict version throws RankDeficient; guarded adds the conditioning ridge.
JedResidual jed_residual(const CMat& Y, const CMat& S, bool guarded = false);

/// || (I - p p^H) Y (I - pinv(S) S) ||_F^2.
double objective(const UnitVec& p, const CMat& S, const CMat& Y);

/// -(Y pinv(S))^H (I - p p^H) Y (I - pinv(S) S), a U x K matrix.
CMat gradient(const CMat& S, const UnitVec& p, const CMat& Y);

/// Gradient from precomputed residual terms.
CMat gradient_from(const JedResidual& r, const UnitVec& p);

/// Pilot columns replaced by S_T; data entries clamped to [-lambda, lambda] in
/// real and imaginary part independently.
CMat prox_box(const CMat& X, const CMat& S_T, double lambda);

/// Adaptive Barzilai-Borwein step from iterate and gradient differences.
/// Returns tau_prev if the curvature estimate is non-positive or non-finite.
double bb_stepsize(const CMat& dS, const CMat& dG, double tau_prev);

/// v1(Y Y^H + Gamma) with Gamma zero except Gamma(0,0) = scale * B * U * K.
UnitVec preprocess(const CMat& Y, int U, double gamma_reg_scale = 0.1);

/// What an iteration observer sees after iteration t has produced S(t+1).
struct IterateView {
  int t = 0;
  const CMat& S;  // U x K, after the prox / PMA step
  const UnitVec& p;
  double tau = 0.0;  // step size that will be used at iteration t + 1
  bool stalled = false;
};

using IterationObserver = std::function<void(const IterateView&)>;

struct MaedResult {
  DetectionResult detection;
  UnitVec p;
  int stalled_steps = 0;
};

/// Forward-backward splitting with box prior and single-step subspace tracking.
/// Throws Runtime naming the iteration if the iterates become non-finite.
MaedResult run_maed(const CMat& Y, const CMat& S_T, const Constellation& c, const MaedConfig& cfg = {},
                    const IterationObserver& observer = {});

}  // namespace smartjam
