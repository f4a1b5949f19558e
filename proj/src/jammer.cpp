#include "smartjam/jammer.hpp"

#include "smartjam/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace smartjam {

std::string to_string(JammerKind kind) {
  switch (kind) {
    case JammerKind::Barrage: return "BARRAGE";
    case JammerKind::Pilot: return "PILOT";
    case JammerKind::Data: return "DATA";
    case JammerKind::Sparse: return "SPARSE";
    case JammerKind::None: return "NONE";
    case JammerKind::Impersonate: return "IMPERSONATE";
    case JammerKind::DataDependent: return "DATA_DEPENDENT";
  }
  return "?";
}

JammerKind jammer_kind_from_string(const std::string& name) {
  for (auto k : {JammerKind::Barrage, JammerKind::Pilot, JammerKind::Data, JammerKind::Sparse, JammerKind::None,
                 JammerKind::Impersonate, JammerKind::DataDependent}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown jammer kind '" + name + "'");
}

std::string to_string(SymbolLaw law) { return law == SymbolLaw::Gaussian ? "GAUSSIAN" : "CONSTELLATION"; }

SymbolLaw symbol_law_from_string(const std::string& name) {
  if (name == "GAUSSIAN") return SymbolLaw::Gaussian;
  if (name == "CONSTELLATION") return SymbolLaw::Constellation;
  throw Error(ErrorKind::InvalidArgument, "unknown symbol law '" + name + "'");
}

namespace {

int sparse_count(double alpha, int K) { return static_cast<int>(std::floor(alpha * K + 1e-9)); }

}  // namespace

double JammerProfile::duty_cycle(const SystemConfig& cfg) const {
  const double K = cfg.K;
  switch (kind) {
    case JammerKind::Barrage:
    case JammerKind::Impersonate:
    case JammerKind::DataDependent: return 1.0;
    case JammerKind::Pilot: return cfg.T / K;
    case JammerKind::Data: return cfg.D / K;
    case JammerKind::Sparse: return sparse_count(sparse_alpha, cfg.K) / K;
    case JammerKind::None: return 0.0;
  }
  return 1.0;
}

std::string JammerProfile::describe() const {
  std::string s = to_string(kind);
  if (kind == JammerKind::None) return s;
  if (kind == JammerKind::Sparse) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "(%g)", sparse_alpha);
    s += buf;
  }
  if (kind == JammerKind::Impersonate) s += "(" + std::to_string(ue_index) + ")";
  s += "/" + to_string(law);
  char buf[48];
  std::snprintf(buf, sizeof buf, "/%s=%gdB", power.mode == PowerMode::RhoE ? "rhoE" : "rhoP", power.value_db);
  s += buf;
  return s;
}

cplx draw_symbol(SymbolLaw law, const Constellation& c, Rng& rng) {
  if (law == SymbolLaw::Gaussian) return rng.cnormal();
  return c.points[rng.below(c.size())];
}

JamSequence synthesize(const JammerProfile& profile, const SystemConfig& cfg, const Constellation& c,
                       const Frame& frame, Rng& rng) {
  const int K = cfg.K, T = cfg.T, D = cfg.D;
  JamSequence js;
  js.w = CVec::Zero(K);
  js.mask.assign(static_cast<std::size_t>(K), false);
  if (profile.kind == JammerKind::None) return js;

  auto fill = [&](int k) {
    js.mask[static_cast<std::size_t>(k)] = true;
    js.w(k) = draw_symbol(profile.law, c, rng);
  };

  // Expected energy of the unscaled sequence; each active symbol has unit energy.
  double expected_energy = 0.0;
  switch (profile.kind) {
    case JammerKind::Barrage:
      for (int k = 0; k < K; ++k) fill(k);
      expected_energy = K;
      break;
    case JammerKind::Pilot:
      for (int k = 0; k < T; ++k) fill(k);
      expected_energy = T;
      break;
    case JammerKind::Data:
      for (int k = T; k < K; ++k) fill(k);
      expected_energy = D;
      break;
    case JammerKind::Sparse: {
      if (!(profile.sparse_alpha > 0.0 && profile.sparse_alpha <= 1.0)) {
        throw Error(ErrorKind::InvalidJammer, "sparse jammer: alpha must lie in (0, 1]");
      }
      const int n = sparse_count(profile.sparse_alpha, K);
      // Partial Fisher-Yates: exactly n distinct slots.
      std::vector<int> slots(static_cast<std::size_t>(K));
      std::iota(slots.begin(), slots.end(), 0);
      for (int i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(K - i));
        std::swap(slots[static_cast<std::size_t>(i)], slots[r]);
      }
      std::sort(slots.begin(), slots.begin() + n);
      for (int i = 0; i < n; ++i) fill(slots[static_cast<std::size_t>(i)]);
      expected_energy = n;
      break;
    }
    case JammerKind::Impersonate: {
      if (profile.ue_index < 0 || profile.ue_index >= cfg.U) {
        throw Error(ErrorKind::InvalidJammer, "impersonating jammer: UE index " + std::to_string(profile.ue_index) +
                                                  " out of range [0, " + std::to_string(cfg.U) + ")");
      }
      for (int k = 0; k < T; ++k) {
        js.mask[static_cast<std::size_t>(k)] = true;
        js.w(k) = frame.S_T(profile.ue_index, k);
      }
      for (int k = T; k < K; ++k) {
        js.mask[static_cast<std::size_t>(k)] = true;
        js.w(k) = c.points[rng.below(c.size())];
      }
      expected_energy = frame.S_T.row(profile.ue_index).squaredNorm() + D;
      break;
    }
    case JammerKind::DataDependent: {
      if (D < 1) throw Error(ErrorKind::InvalidJammer, "data-dependent jammer needs D >= 1");
      // Alternative data matrix differing from S_D in one row, with valid symbols.
      const int row = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.U)));
      CMat S_alt = frame.S_D;
      bool differs = false;
      while (!differs) {
        for (int k = 0; k < D; ++k) {
          S_alt(row, k) = c.points[rng.below(c.size())];
          if (S_alt(row, k) != frame.S_D(row, k)) differs = true;
        }
      }
      CVec w_T(T);
      for (int k = 0; k < T; ++k) w_T(k) = rng.cnormal();
      const CVec w_D = (w_T.transpose() * pinv_wide(frame.S_T) * S_alt).transpose();
      js.w.head(T) = w_T;
      js.w.tail(D) = w_D;
      std::fill(js.mask.begin(), js.mask.end(), true);
      // Energy of w_D depends on the pilots; normalize on the realized sequence.
      expected_energy = js.w.squaredNorm();
      break;
    }
    case JammerKind::None: break;
  }

  PowerSpec spec = profile.power;
  spec.duty_cycle = profile.duty_cycle(cfg);
  js.gain = jammer_gain(spec, cfg, expected_energy);
  js.w *= js.gain;
  return js;
}

CMat apply_jammer(const CMat& Y0, const CVec& j, const CVec& w) {
  if (j.size() != Y0.rows() || w.size() != Y0.cols()) {
    throw Error(ErrorKind::Shape, "apply_jammer: shapes of Y0, j, w disagree");
  }
  return Y0 + j * w.transpose();
}

}  // namespace smartjam
