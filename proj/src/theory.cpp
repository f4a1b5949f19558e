#include "smartjam/theory.hpp"

#include "smartjam/channel.hpp"
#include "smartjam/error.hpp"
#include "smartjam/maed.hpp"

#include <json.hpp>

#include <cmath>

namespace smartjam {

CMat sigma_matrix(const CMat& S_T, const CMat& S_D, const CMat& S_alt, const CVec& w) {
  const Eigen::Index U = S_T.rows(), T = S_T.cols(), D = S_D.cols();
  if (S_D.rows() != U || S_alt.rows() != U || S_alt.cols() != D || w.size() != T + D) {
    throw Error(ErrorKind::Shape, "sigma_matrix: shape mismatch");
  }
  CMat sigma(U + 1, D);
  sigma.topRows(U) = S_D - S_alt;
  const CVec w_T = w.head(T), w_D = w.tail(D);
  sigma.row(U) = w_D.transpose() - w_T.transpose() * pinv_wide(S_T) * S_alt;
  return sigma;
}

namespace {

class Enumerator {
 public:
  Enumerator(const Constellation& c, Eigen::Index U, Eigen::Index D)
      : c_(c), U_(U), D_(D), digits_(static_cast<std::size_t>(U * D), 0), S_(CMat::Constant(U, D, c.points[0])) {}

  const CMat& current() const { return S_; }

  bool advance() {
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      const auto u = static_cast<Eigen::Index>(i) % U_, k = static_cast<Eigen::Index>(i) / U_;
      if (++digits_[i] < c_.size()) {
        S_(u, k) = c_.points[digits_[i]];
        return true;
      }
      digits_[i] = 0;
      S_(u, k) = c_.points[0];
    }
    return false;
  }

 private:
  const Constellation& c_;
  Eigen::Index U_, D_;
  std::vector<std::size_t> digits_;
  CMat S_;
};

void guard_size(const Constellation& c, Eigen::Index U, Eigen::Index D) {
  const double count = std::pow(static_cast<double>(c.size()), static_cast<double>(U * D));
  if (count > kMaxEnumeration) {
    throw Error(ErrorKind::TooLarge, "exhaustive search over " + std::to_string(count) + " candidates exceeds 1e7");
  }
}

}  // namespace

EclipseReport is_eclipsed_bruteforce(const CMat& S_T, const CMat& S_D, const CVec& w, const Constellation& c) {
  const Eigen::Index U = S_D.rows(), D = S_D.cols();
  guard_size(c, U, D);
  EclipseReport rep;
  const CMat pinv_T = pinv_wide(S_T);
  const Eigen::Index T = S_T.cols();
  const CVec w_T = w.head(T), w_D = w.tail(D);
  const Eigen::RowVectorXcd wT_pinv = w_T.transpose() * pinv_T;
  Enumerator it(c, U, D);
  CMat sigma(U + 1, D);
  // Scale reference so that "rank zero" is judged relative to the data.
  const double abs_tol = 1e-12 * std::max(1.0, S_D.norm() + w.norm());
  do {
    const CMat& S_alt = it.current();
    if (S_alt == S_D) continue;
    ++rep.candidates;
    sigma.topRows(U) = S_D - S_alt;
    sigma.row(U) = w_D.transpose() - wT_pinv * S_alt;
    const int r = numerical_rank(sigma, kRankRelTol, abs_tol);
    rep.sigma_rank = r;
    if (r == 1) {
      rep.eclipsed = true;
      rep.witness = S_alt;
      return rep;
    }
  } while (it.advance());
  return rep;
}

InnerMinimum minimize_over_direction(const CMat& Y, const CMat& S) {
  const JedResidual r = jed_residual(Y, S);
  Eigen::JacobiSVD<CMat> svd(r.E, Eigen::ComputeThinU);
  const RVec& s = svd.singularValues();
  double tail = 0.0;
  for (Eigen::Index i = 1; i < s.size(); ++i) tail += s(i) * s(i);
  CVec u1 = svd.matrixU().col(0);
  return {tail, UnitVec::normalized(canonical_phase(u1))};
}

EclipseStats eclipse_statistics(const SystemConfig& cfg, const JammerProfile& jammer, int trials, Rng& rng) {
  cfg.validate();
  const Constellation c = make_constellation(cfg.constellation);
  guard_size(c, cfg.U, cfg.D);
  EclipseStats st;
  st.trials = trials;
  for (int n = 0; n < trials; ++n) {
    const CMat pilots = make_pilots(cfg, &rng);
    const Frame frame = draw_frame(cfg, c, pilots, rng);
    const JamSequence js = synthesize(jammer, cfg, c, frame, rng);
    const EclipseReport r = is_eclipsed_bruteforce(frame.S_T, frame.S_D, js.w, c);
    st.candidates_per_trial = r.candidates;
    if (r.eclipsed) ++st.eclipsed;
  }
  return st;
}

Theorem1Report verify_theorem1(const SystemConfig& cfg, const JammerProfile& jammer, int trials, Rng& rng) {
  cfg.validate();
  const Constellation c = make_constellation(cfg.constellation);
  guard_size(c, cfg.U, cfg.D);
  Theorem1Report rep;
  rep.trials = trials;
  for (int n = 0; n < trials; ++n) {
    const CMat pilots = make_pilots(cfg, &rng);
    const Frame frame = draw_frame(cfg, c, pilots, rng);
    const ChannelRealization ch = rayleigh(cfg, rng);
    const JamSequence js = synthesize(jammer, cfg, c, frame, rng);
    if (is_eclipsed_bruteforce(frame.S_T, frame.S_D, js.w, c).eclipsed) {
      ++rep.eclipsed_skipped;
      continue;
    }
    const CMat Y = apply_jammer(ch.H * frame.full(), ch.j, js.w);
    const double ynorm2 = Y.squaredNorm();
    const double thr = rep.zero_threshold * ynorm2;

    int zeros = 0;
    bool zero_at_truth = false;
    std::optional<UnitVec> p_true;
    CMat S(cfg.U, cfg.K);
    S.leftCols(cfg.T) = frame.S_T;
    Enumerator it(c, cfg.U, cfg.D);
    std::uint64_t count = 0;
    do {
      ++count;
      S.rightCols(cfg.D) = it.current();
      const InnerMinimum m = minimize_over_direction(Y, S);
      const bool truth = it.current() == frame.S_D;
      if (truth) {
        rep.max_true_objective = std::max(rep.max_true_objective, m.value / ynorm2);
        p_true = m.p;
      } else {
        rep.min_wrong_objective = std::min(rep.min_wrong_objective, m.value / ynorm2);
      }
      if (m.value <= thr) {
        ++zeros;
        zero_at_truth |= truth;
      }
    } while (it.advance());
    rep.candidates_per_trial = count;

    if (zeros == 1 && zero_at_truth) {
      ++rep.unique_recoveries;
    } else {
      ++rep.non_unique;
    }
    const CVec j_unit = ch.j / ch.j.norm();
    const double coll = std::abs(p_true->vec().dot(j_unit));
    rep.max_collinearity_error = std::max(rep.max_collinearity_error, std::abs(coll - 1.0));
    if (std::abs(coll - 1.0) <= 1e-8) ++rep.collinear;

    const CMat H_P_hat = project_out(*p_true, Y.leftCols(cfg.T)) * pinv_wide(frame.S_T);
    const CMat PH = project_out(UnitVec::normalized(ch.j), ch.H);
    if ((H_P_hat - PH).norm() <= 1e-8 * std::max(1.0, PH.norm())) ++rep.channel_recovered;
  }
  return rep;
}

std::string Theorem1Report::to_json() const {
  nlohmann::ordered_json j;
  j["trials"] = trials;
  j["eclipsed_skipped"] = eclipsed_skipped;
  j["unique_recoveries"] = unique_recoveries;
  j["collinear"] = collinear;
  j["channel_recovered"] = channel_recovered;
  j["non_unique"] = non_unique;
  j["max_true_objective_rel"] = max_true_objective;
  j["min_wrong_objective_rel"] = min_wrong_objective;
  j["max_collinearity_error"] = max_collinearity_error;
  j["zero_threshold_rel"] = zero_threshold;
  j["collinearity_tolerance"] = 1e-8;
  j["candidates_per_trial"] = candidates_per_trial;
  j["passed"] = all_passed();
  return j.dump(2);
}

double eclipse_bound_log10(std::size_t constellation_size, int U, int D) {
  return (3.0 * U - (U - 3.0) * D) * std::log10(static_cast<double>(constellation_size));
}

}  // namespace smartjam
