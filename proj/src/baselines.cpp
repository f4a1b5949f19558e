#include "smartjam/baselines.hpp"

#include "smartjam/error.hpp"

#include <cmath>

namespace smartjam {

CMat ls_chest(const CMat& Y_T, const CMat& S_T) { return Y_T * pinv_wide(S_T); }

DetectionResult lmmse_detect(const CMat& Y_D, const CMat& H_hat, double N0, const Constellation& c) {
  if (N0 < 0.0) throw Error(ErrorKind::InvalidArgument, "lmmse_detect: N0 must be >= 0");
  CMat G = H_hat.adjoint() * H_hat;
  G.diagonal().array() += N0;
  Eigen::LDLT<CMat> ldlt(G);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      ldlt.vectorD().real().minCoeff() <= 1e-13 * std::max(1.0, ldlt.vectorD().real().maxCoeff())) {
    throw Error(ErrorKind::RankDeficient, "lmmse_detect: regularized Gram matrix is singular");
  }
  CMat S_hat = ldlt.solve(H_hat.adjoint() * Y_D);
  return hard_decide(std::move(S_hat), c);
}

DetectionResult lmmse_receiver(const CMat& Y, const CMat& S_T, double N0, const Constellation& c) {
  const Eigen::Index T = S_T.cols();
  const CMat H_hat = ls_chest(Y.leftCols(T), S_T);
  return lmmse_detect(Y.rightCols(Y.cols() - T), H_hat, N0, c);
}

DetectionResult project_and_detect(const CMat& Y, const UnitVec& direction, const CMat& S_T, double N0,
                                   const Constellation& c) {
  return lmmse_receiver(project_out(direction, Y), S_T, N0, c);
}

DetectionResult genie_pos_detect(const CMat& Y, const CVec& j, const CMat& S_T, double N0, const Constellation& c) {
  if (!(j.norm() > 0.0)) throw Error(ErrorKind::InvalidArgument, "genie_pos_detect: jammer channel is zero");
  return project_and_detect(Y, UnitVec::normalized(j), S_T, N0, c);
}

UnitVec pos_estimate_direction(const CMat& Y_J) {
  const CMat A = Y_J * Y_J.adjoint();
  return dominant_eigvec(0.5 * (A + A.adjoint()));
}

DetectionResult pos_detect(const CMat& Y, const CMat& Y_J, const CMat& S_T, double N0, const Constellation& c) {
  return project_and_detect(Y, pos_estimate_direction(Y_J), S_T, N0, c);
}

DetectionResult simo_mrc_detect(const CMat& H, const CMat& S_D, double N0, const Constellation& c, Rng& rng) {
  const Eigen::Index B = H.rows(), U = H.cols(), D = S_D.cols();
  CMat S_hat(U, D);
  CVec y(B);
  for (Eigen::Index u = 0; u < U; ++u) {
    const CVec h = H.col(u);
    const double hn2 = h.squaredNorm();
    for (Eigen::Index k = 0; k < D; ++k) {
      for (Eigen::Index b = 0; b < B; ++b) y(b) = h(b) * S_D(u, k) + rng.cnormal(N0);
      S_hat(u, k) = h.dot(y) / hn2;  // Eigen's dot conjugates the left operand
    }
  }
  return hard_decide(std::move(S_hat), c);
}

std::vector<SimoPoint> jl_simo_bound(const SystemConfig& cfg, const Constellation& c, Rng& rng,
                                     const std::vector<double>& snr_grid, std::uint64_t bits_per_point) {
  std::vector<SimoPoint> out;
  const int bps = c.bits_per_symbol;
  const int D = std::max(1, cfg.D);
  for (double snr_db : snr_grid) {
    const double N0 = noise_variance(cfg.U, snr_db);
    ErrorTally tally;
    while (tally.bits < bits_per_point) {
      CMat h(cfg.B, 1);
      for (int b = 0; b < cfg.B; ++b) h(b, 0) = rng.cnormal();
      std::vector<int> labels(static_cast<std::size_t>(D));
      std::vector<std::uint8_t> bits(static_cast<std::size_t>(D * bps));
      for (int k = 0; k < D; ++k) {
        int label = 0;
        for (int i = 0; i < bps; ++i) {
          const int bit = rng.bit() ? 1 : 0;
          bits[static_cast<std::size_t>(k * bps + i)] = static_cast<std::uint8_t>(bit);
          label |= bit << i;
        }
        labels[static_cast<std::size_t>(k)] = label;
      }
      const CMat S = map_labels(c, labels, 1, D);
      tally += count_errors(simo_mrc_detect(h, S, N0, c, rng), bits, labels);
    }
    out.push_back({snr_db, tally.ber(), tally.bits});
  }
  return out;
}

double mrc_rayleigh_ber(int L, double gamma_b) {
  if (gamma_b <= 0.0) return 0.5;
  const double mu = std::sqrt(gamma_b / (1.0 + gamma_b));
  const double log_a = std::log((1.0 - mu) / 2.0);
  const double log_b = std::log((1.0 + mu) / 2.0);
  double sum = 0.0;
  for (int k = 0; k < L; ++k) {
    const double log_binom = std::lgamma(L + k) - std::lgamma(k + 1) - std::lgamma(L);
    sum += std::exp(L * log_a + log_binom + k * log_b);
  }
  return sum;
}

}  // namespace smartjam
