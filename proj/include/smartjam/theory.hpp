#pragma once

#include "smartjam/jammer.hpp"
#include "smartjam/numerics.hpp"
#include "smartjam/rng.hpp"
#include "smartjam/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace smartjam {

/// [S_D - S_alt; w_D^T - w_T^T pinv(S_T) S_alt], an (U + 1) x D matrix.
CMat sigma_matrix(const CMat& S_T, const CMat& S_D, const CMat& S_alt, const CVec& w);

/// Rank-one test with relative singular-value gap sigma_2 / sigma_1 <= 1e-9.
inline constexpr double kRankRelTol = 1e-9;

struct EclipseReport {
  bool eclipsed = false;
  std::optional<CMat> witness;  // alternative data matrix making sigma rank one
  int sigma_rank = 0;           // rank of sigma at the witness (or at the last candidate tried)
  std::uint64_t candidates = 0;
};

inline constexpr double kMaxEnumeration = 1e7;

/// Exhaustive search over all alternative data matrices in S^{U x D} minus {S_D}.
/// Throws TooLarge if |S|^(U D) exceeds 1e7.
EclipseReport is_eclipsed_bruteforce(const CMat& S_T, const CMat& S_D, const CVec& w, const Constellation& c);

struct InnerMinimum {
  double value = 0.0;  // min over unit p of ||(I - p p^H) E||_F^2
  UnitVec p;           // minimizer v1(E E^H)
};

/// Closed-form minimization of the JED objective over the nulling direction for
/// a fixed symbol matrix S: the tail sum of squared singular values of E.
InnerMinimum minimize_over_direction(const CMat& Y, const CMat& S);

struct Theorem1Report {
  int trials = 0;
  int eclipsed_skipped = 0;
  int unique_recoveries = 0;  // min attained only at the true S_D
  int collinear = 0;          // |<p_hat, j / ||j||>| = 1 +- 1e-8
  int channel_recovered = 0;  // P~ Y_T pinv(S_T) equals P H
  int non_unique = 0;
  double max_true_objective = 0.0;      // relative to ||Y||_F^2
  double min_wrong_objective = 1e300;   // relative to ||Y||_F^2
  double max_collinearity_error = 0.0;
  double zero_threshold = 1e-16;
  std::uint64_t candidates_per_trial = 0;

  bool all_passed() const {
    const int checked = trials - eclipsed_skipped;
    return unique_recoveries == checked && collinear == checked && channel_recovered == checked;
  }
  std::string to_json() const;
};

/// Noiseless exhaustive verification of unique recovery at desk scale.
Theorem1Report verify_theorem1(const SystemConfig& cfg, const JammerProfile& jammer, int trials, Rng& rng);

struct EclipseStats {
  int trials = 0;
  int eclipsed = 0;
  std::uint64_t candidates_per_trial = 0;
};

/// Draws `trials` frames and jammer sequences and counts how many are eclipsed.
EclipseStats eclipse_statistics(const SystemConfig& cfg, const JammerProfile& jammer, int trials, Rng& rng);

/// (3U - (U - 3) D) log10 |S|.
double eclipse_bound_log10(std::size_t constellation_size, int U, int D);

}  // namespace smartjam
