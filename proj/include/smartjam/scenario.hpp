#pragma once

#include "smartjam/numerics.hpp"
#include "smartjam/rng.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace smartjam {

enum class ConstellationKind { QPSK, QAM16 };

std::string to_string(ConstellationKind kind);
ConstellationKind constellation_from_string(const std::string& name);

/// Unit-average-energy constellation with its Gray labels.
///
/// Bit conventions (bit index 0 first):
///   QPSK:   b0 = 1 iff Re > 0, b1 = 1 iff Im > 0.
///   16-QAM: b0 = 1 iff Re > 0, b1 = 1 iff |Re| is the inner level lambda/3,
///           b2, b3 the same on Im.
/// These match the sign of the max-log LLR expressions used by the soft demapper.
struct Constellation {
  ConstellationKind kind = ConstellationKind::QPSK;
  double lambda = 0.0;  // edge of the convex hull [-lambda, lambda]^2
  int bits_per_symbol = 0;
  std::vector<cplx> points;                 // indexed by label (bit i of label = b_i)
  std::vector<std::vector<int>> gray_bits;  // gray_bits[label][i]

  std::size_t size() const { return points.size(); }
  cplx map(const int* bits) const;
  /// Label of the nearest point; ties resolved toward bit 0.
  int slice(cplx x) const;
};

Constellation make_constellation(ConstellationKind kind);

enum class PilotMode { Hadamard, Haar };

struct SystemConfig {
  int B = 128;
  int U = 32;
  int K = 160;
  int T = 32;
  int D = 128;
  ConstellationKind constellation = ConstellationKind::QPSK;
  double snr_db = 10.0;
  std::uint64_t seed = 1;
  PilotMode pilots = PilotMode::Hadamard;

  /// Throws Config on violated invariants (K = T + D, T >= U, D >= 1, B > U).
  void validate() const;
};

/// Bits are stored as bits[(u * D + k) * bps + i].
struct Frame {
  CMat S_T;  // U x T
  CMat S_D;  // U x D
  std::vector<std::uint8_t> bits;
  std::vector<int> labels;  // labels[u * D + k]

  CMat full() const;  // [S_T, S_D]
};

/// Deterministic mode: first U rows of the Sylvester-Hadamard matrix of order T
/// (T a power of two). Haar mode: U rows of a Haar unitary T x T, scaled by sqrt(T).
CMat make_pilots(const SystemConfig& cfg, Rng* rng = nullptr);

CMat hadamard(int order);

Frame draw_frame(const SystemConfig& cfg, const Constellation& c, const CMat& pilots, Rng& rng);

/// Maps a U x D label array into symbols.
CMat map_labels(const Constellation& c, const std::vector<int>& labels, int U, int D);

/// Noise variance N0 = U / SNR for unit-variance Rayleigh UE channels.
double noise_variance(int U, double snr_db);
inline double noise_variance(const SystemConfig& cfg) { return noise_variance(cfg.U, cfg.snr_db); }

enum class PowerMode { RhoE, RhoP };

struct PowerSpec {
  PowerMode mode = PowerMode::RhoE;
  double value_db = 30.0;
  double duty_cycle = 1.0;  // gamma; filled in from the jammer kind

  /// rho_E in linear scale (rho_E = rho_P * gamma).
  double rho_e() const;
};

/// Amplitude gain g for a jam sequence with expected energy E_w so that the
/// ensemble energy ratio equals the requested rho_E: g^2 = rho_E * K / E_w.
/// Throws InvalidJammer if E_w <= 0 and the target is finite.
double jammer_gain(const PowerSpec& spec, const SystemConfig& cfg, double expected_energy);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace smartjam
