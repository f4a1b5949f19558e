#pragma once

#include "smartjam/detection.hpp"
#include "smartjam/numerics.hpp"
#include "smartjam/rng.hpp"
#include "smartjam/scenario.hpp"

#include <vector>

namespace smartjam {

/// Least-squares channel estimate Y_T pinv(S_T).
CMat ls_chest(const CMat& Y_T, const CMat& S_T);

/// Per-column LMMSE (H^H H + N0 I)^{-1} H^H y followed by hard slicing.
/// Throws RankDeficient when N0 = 0 and H^H H is singular.
DetectionResult lmmse_detect(const CMat& Y_D, const CMat& H_hat, double N0, const Constellation& c);

/// LS estimation + LMMSE detection on a receive matrix Y = [Y_T, Y_D].
DetectionResult lmmse_receiver(const CMat& Y, const CMat& S_T, double N0, const Constellation& c);

/// Projects Y onto the orthogonal complement of `direction` and runs the LMMSE
/// receiver in the projected system. Noise in the projected system is treated
/// as white with variance N0; on the (B-1)-dimensional complement this is exact.
DetectionResult project_and_detect(const CMat& Y, const UnitVec& direction, const CMat& S_T, double N0,
                                   const Constellation& c);

/// Genie-aided projection onto the complement of span(j). Throws InvalidArgument for j = 0.
DetectionResult genie_pos_detect(const CMat& Y, const CVec& j, const CMat& S_T, double N0, const Constellation& c);

/// Jammer direction estimate from UE-silent samples: dominant left singular vector of Y_J.
UnitVec pos_estimate_direction(const CMat& Y_J);

/// POS: estimate the jammer subspace from Y_J, then as genie_pos_detect.
DetectionResult pos_detect(const CMat& Y, const CMat& Y_J, const CMat& S_T, double N0, const Constellation& c);

/// Jammerless single-user MRC with perfect CSI for each UE column of H on the
/// given data symbols: y_u = h_u s_u + n, s_hat = h_u^H y_u / ||h_u||^2.
DetectionResult simo_mrc_detect(const CMat& H, const CMat& S_D, double N0, const Constellation& c, Rng& rng);

struct SimoPoint {
  double snr_db = 0.0;
  double ber = 0.0;
  std::uint64_t bits = 0;
};

/// Monte Carlo JL-SIMO bound: one UE, B antennas, i.i.d. CN(0,1) channel, noise
/// variance from the system SNR definition (N0 = U / SNR).
std::vector<SimoPoint> jl_simo_bound(const SystemConfig& cfg, const Constellation& c, Rng& rng,
                                     const std::vector<double>& snr_grid, std::uint64_t bits_per_point);

/// Closed-form BER of binary antipodal signalling with L-branch MRC over i.i.d.
/// Rayleigh fading at mean per-branch bit SNR gamma_b.
double mrc_rayleigh_ber(int L, double gamma_b);

}  // namespace smartjam
