#include "smartjam/scenario.hpp"

#include "smartjam/error.hpp"

#include <cmath>
#include <limits>

namespace smartjam {

std::string to_string(ConstellationKind kind) {
  switch (kind) {
    case ConstellationKind::QPSK: return "QPSK";
    case ConstellationKind::QAM16: return "QAM16";
  }
  return "?";
}

ConstellationKind constellation_from_string(const std::string& name) {
  if (name == "QPSK") return ConstellationKind::QPSK;
  if (name == "QAM16" || name == "16QAM" || name == "16-QAM") return ConstellationKind::QAM16;
  throw Error(ErrorKind::InvalidArgument, "unsupported constellation '" + name + "'");
}

cplx Constellation::map(const int* bits) const {
  int label = 0;
  for (int i = 0; i < bits_per_symbol; ++i) label |= (bits[i] & 1) << i;
  return points[static_cast<std::size_t>(label)];
}

namespace {

// One real dimension of 16-QAM from (sign bit, inner bit).
double qam16_level(double lambda, int sign_bit, int inner_bit) {
  const double mag = inner_bit ? lambda / 3.0 : lambda;
  return sign_bit ? mag : -mag;
}

}  // namespace

int Constellation::slice(cplx x) const {
  // Per-dimension slicing; ties (exact boundary) go toward bit 0.
  if (kind == ConstellationKind::QPSK) {
    const int b0 = x.real() > 0.0 ? 1 : 0;
    const int b1 = x.imag() > 0.0 ? 1 : 0;
    return b0 | (b1 << 1);
  }
  const double thr = 2.0 * lambda / 3.0;
  const int b0 = x.real() > 0.0 ? 1 : 0;
  const int b1 = std::abs(x.real()) < thr ? 1 : 0;
  const int b2 = x.imag() > 0.0 ? 1 : 0;
  const int b3 = std::abs(x.imag()) < thr ? 1 : 0;
  return b0 | (b1 << 1) | (b2 << 2) | (b3 << 3);
}

Constellation make_constellation(ConstellationKind kind) {
  Constellation c;
  c.kind = kind;
  if (kind == ConstellationKind::QPSK) {
    c.lambda = std::sqrt(0.5);
    c.bits_per_symbol = 2;
  } else {
    c.lambda = std::sqrt(0.9);
    c.bits_per_symbol = 4;
  }
  const int M = 1 << c.bits_per_symbol;
  c.points.resize(static_cast<std::size_t>(M));
  c.gray_bits.resize(static_cast<std::size_t>(M));
  for (int label = 0; label < M; ++label) {
    std::vector<int> b(static_cast<std::size_t>(c.bits_per_symbol));
    for (int i = 0; i < c.bits_per_symbol; ++i) b[static_cast<std::size_t>(i)] = (label >> i) & 1;
    cplx p;
    if (kind == ConstellationKind::QPSK) {
      p = {b[0] ? c.lambda : -c.lambda, b[1] ? c.lambda : -c.lambda};
    } else {
      p = {qam16_level(c.lambda, b[0], b[1]), qam16_level(c.lambda, b[2], b[3])};
    }
    c.points[static_cast<std::size_t>(label)] = p;
    c.gray_bits[static_cast<std::size_t>(label)] = std::move(b);
  }
  return c;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (B < 1 || U < 1 || T < 1 || D < 1) fail("dimensions must be positive");
  if (K != T + D) fail("K must equal T + D");
  if (T < U) fail("T must be >= U for full-row-rank pilots");
  if (B <= U) fail("B must exceed U");
}

CMat Frame::full() const {
  CMat S(S_T.rows(), S_T.cols() + S_D.cols());
  S << S_T, S_D;
  return S;
}

CMat hadamard(int order) {
  if (order < 1 || (order & (order - 1)) != 0) {
    throw Error(ErrorKind::InvalidArgument,
                "no Sylvester-Hadamard construction for order " + std::to_string(order));
  }
  CMat H = CMat::Ones(1, 1);
  while (H.rows() < order) {
    const Eigen::Index n = H.rows();
    CMat N(2 * n, 2 * n);
    N << H, H, H, -H;
    H = std::move(N);
  }
  return H;
}

CMat make_pilots(const SystemConfig& cfg, Rng* rng) {
  if (cfg.pilots == PilotMode::Hadamard) {
    return hadamard(cfg.T).topRows(cfg.U);
  }
  if (rng == nullptr) {
    throw Error(ErrorKind::InvalidArgument, "make_pilots: Haar mode requires an RNG");
  }
  // Haar unitary via QR of a complex Ginibre matrix with the R-diagonal phases removed.
  CMat G(cfg.T, cfg.T);
  for (Eigen::Index c = 0; c < G.cols(); ++c)
    for (Eigen::Index r = 0; r < G.rows(); ++r) G(r, c) = rng->cnormal();
  Eigen::HouseholderQR<CMat> qr(G);
  CMat Q = qr.householderQ();
  const CMat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < Q.cols(); ++i) {
    const cplx d = R(i, i);
    const double a = std::abs(d);
    if (a > 0.0) Q.col(i) *= d / a;
  }
  // Rows of a unitary matrix; entries then have unit energy on average.
  return std::sqrt(static_cast<double>(cfg.T)) * Q.topRows(cfg.U);
}

CMat map_labels(const Constellation& c, const std::vector<int>& labels, int U, int D) {
  CMat S(U, D);
  for (int u = 0; u < U; ++u)
    for (int k = 0; k < D; ++k) S(u, k) = c.points[static_cast<std::size_t>(labels[static_cast<std::size_t>(u * D + k)])];
  return S;
}

Frame draw_frame(const SystemConfig& cfg, const Constellation& c, const CMat& pilots, Rng& rng) {
  Frame f;
  f.S_T = pilots;
  const int bps = c.bits_per_symbol;
  f.bits.resize(static_cast<std::size_t>(cfg.U) * cfg.D * bps);
  f.labels.resize(static_cast<std::size_t>(cfg.U) * cfg.D);
  for (int u = 0; u < cfg.U; ++u) {
    for (int k = 0; k < cfg.D; ++k) {
      int label = 0;
      for (int i = 0; i < bps; ++i) {
        const int b = rng.bit() ? 1 : 0;
        f.bits[static_cast<std::size_t>((u * cfg.D + k) * bps + i)] = static_cast<std::uint8_t>(b);
        label |= b << i;
      }
      f.labels[static_cast<std::size_t>(u * cfg.D + k)] = label;
    }
  }
  f.S_D = map_labels(c, f.labels, cfg.U, cfg.D);
  return f;
}

double noise_variance(int U, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return static_cast<double>(U) / db_to_linear(snr_db);
}

double PowerSpec::rho_e() const {
  if (std::isinf(value_db) && value_db < 0) return 0.0;
  const double v = db_to_linear(value_db);
  return mode == PowerMode::RhoE ? v : v * duty_cycle;
}

double jammer_gain(const PowerSpec& spec, const SystemConfig& cfg, double expected_energy) {
  const double rho = spec.rho_e();
  if (rho == 0.0) return 0.0;
  if (!(expected_energy > 0.0)) {
    throw Error(ErrorKind::InvalidJammer, "jammer_gain: jam sequence has zero expected energy");
  }
  return std::sqrt(rho * static_cast<double>(cfg.K) / expected_energy);
}

}  // namespace smartjam
