#pragma once

#include "smartjam/channel.hpp"
#include "smartjam/numerics.hpp"
#include "smartjam/rng.hpp"
#include "smartjam/scenario.hpp"

#include <string>
#include <vector>

namespace smartjam {

enum class JammerKind { Barrage, Pilot, Data, Sparse, None, Impersonate, DataDependent };
enum class SymbolLaw { Gaussian, Constellation };

std::string to_string(JammerKind kind);
JammerKind jammer_kind_from_string(const std::string& name);
std::string to_string(SymbolLaw law);
SymbolLaw symbol_law_from_string(const std::string& name);

struct JammerProfile {
  JammerKind kind = JammerKind::Barrage;
  SymbolLaw law = SymbolLaw::Gaussian;
  PowerSpec power;
  double sparse_alpha = 0.2;  // only meaningful for Sparse
  int ue_index = 0;           // only meaningful for Impersonate
  /// Whether the jammer also transmits in the UE-silent slots a POS receiver
  /// reserves for estimating the jammer subspace.
  bool active_in_estimation = true;

  /// Duty cycle gamma: 1, T/K, D/K, floor(alpha K)/K, or 0 for None.
  double duty_cycle(const SystemConfig& cfg) const;
  std::string describe() const;
};

/// One unit-energy jammer symbol under the given law.
cplx draw_symbol(SymbolLaw law, const Constellation& c, Rng& rng);

struct JamSequence {
  CVec w;                  // length K
  std::vector<bool> mask;  // mask[k] = jammer active in slot k
  double gain = 0.0;       // amplitude applied to the unit-power sequence
};

/// Draws the jammer transmit sequence for one coherence interval, scaled to the
/// profile's power target. Impersonate and DataDependent read the frame (genie
/// jammers); the others ignore it.
JamSequence synthesize(const JammerProfile& profile, const SystemConfig& cfg, const Constellation& c,
                       const Frame& frame, Rng& rng);

/// Y0 + j w^T.
CMat apply_jammer(const CMat& Y0, const CVec& j, const CVec& w);

}  // namespace smartjam
