#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smartjam/channel.hpp"
#include "smartjam/error.hpp"
#include "smartjam/theory.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace smartjam;

namespace {

const Constellation kQpsk = make_constellation(ConstellationKind::QPSK);

SystemConfig cfg_of(int B, int U, int T, int D) {
  SystemConfig cfg;
  cfg.B = B;
  cfg.U = U;
  cfg.T = T;
  cfg.D = D;
  cfg.K = T + D;
  return cfg;
}

CMat random_symbols(Rng& rng, int rows, int cols) {
  CMat S(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) S(i, k) = kQpsk.points[rng.below(kQpsk.size())];
  return S;
}

int numeric_rank(const CMat& A) {
  const Eigen::JacobiSVD<CMat> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > kRankRelTol * s(0);
  return r;
}

}  // namespace

TEST_CASE("sigma matrix examples") {
  Rng rng(1);
  const CMat S_T = make_pilots(cfg_of(8, 2, 2, 3));
  const CMat S_D = random_symbols(rng, 2, 3);
  const CVec zero = CVec::Zero(5);
  CHECK(sigma_matrix(S_T, S_D, S_D, zero).norm() == 0.0);

  CMat alt = S_D;
  alt(1, 2) = -alt(1, 2);
  const CMat sig = sigma_matrix(S_T, S_D, alt, zero);
  CHECK(sig.rows() == 3);
  CHECK(sig.cols() == 3);
  CHECK(sig.row(2).norm() == 0.0);
  CHECK(numeric_rank(sig) == 1);

  // linear in the alternative data matrix
  const CVec w = testutil::random_cvec(rng, 5);
  const CMat A = random_symbols(rng, 2, 3), Bm = random_symbols(rng, 2, 3);
  const CMat lhs = sigma_matrix(S_T, S_D, 0.5 * (A + Bm), w);
  const CMat rhs = 0.5 * (sigma_matrix(S_T, S_D, A, w) + sigma_matrix(S_T, S_D, Bm, w));
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("brute-force eclipsing") {
  Rng rng(2);
  SUBCASE("inactive jammer with one UE is eclipsed") {
    const CMat S_T = make_pilots(cfg_of(4, 1, 1, 2));
    const CMat S_D = random_symbols(rng, 1, 2);
    const EclipseReport r = is_eclipsed_bruteforce(S_T, S_D, CVec::Zero(3), kQpsk);
    CHECK(r.eclipsed);
    REQUIRE(r.witness);
    CHECK(*r.witness != S_D);
  }
  SUBCASE("UE impersonation is eclipsed with the jammer data as witness row") {
    const SystemConfig cfg = cfg_of(8, 2, 2, 2);
    const CMat S_T = make_pilots(cfg);
    const CMat S_D = random_symbols(rng, 2, 2);
    CMat w_D = random_symbols(rng, 1, 2);
    while (w_D.row(0) == S_D.row(1)) w_D = random_symbols(rng, 1, 2);
    CVec w(4);
    w << S_T(1, 0), S_T(1, 1), w_D(0, 0), w_D(0, 1);
    const EclipseReport r = is_eclipsed_bruteforce(S_T, S_D, w, kQpsk);
    CHECK(r.eclipsed);
    CHECK(r.sigma_rank == 1);
    CMat expect = S_D;
    expect.row(1) = w_D.row(0);
    CMat alt = expect;
    CHECK(numeric_rank(sigma_matrix(S_T, S_D, alt, w)) == 1);
  }
  SUBCASE("Gaussian jammers are not eclipsed") {
    const SystemConfig cfg = cfg_of(6, 2, 2, 3);
    JammerProfile jp;
    const EclipseStats st = eclipse_statistics(cfg, jp, 200, rng);
    CHECK(st.trials == 200);
    CHECK(st.eclipsed == 0);
    CHECK(st.candidates_per_trial == 4096 - 1);
  }
  SUBCASE("data-dependent jammer is eclipsed") {
    const SystemConfig cfg = cfg_of(6, 2, 2, 3);
    JammerProfile jp;
    jp.kind = JammerKind::DataDependent;
    const EclipseStats st = eclipse_statistics(cfg, jp, 20, rng);
    CHECK(st.eclipsed == 20);
  }
  SUBCASE("enumeration guard") {
    const CMat S_T = make_pilots(cfg_of(16, 4, 4, 12));
    const CMat S_D = random_symbols(rng, 4, 12);
    CHECK_THROWS_AS(is_eclipsed_bruteforce(S_T, S_D, CVec::Zero(16), kQpsk), Error);
    try {
      is_eclipsed_bruteforce(S_T, S_D, CVec::Zero(16), kQpsk);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TooLarge);
    }
  }
}

TEST_CASE("closed-form direction minimization matches a grid search") {
  Rng rng(3);
  for (int n = 0; n < 5; ++n) {
    const CMat Y = testutil::random_cmat(rng, 2, 6);
    const CMat S = testutil::random_cmat(rng, 1, 6);
    const InnerMinimum m = minimize_over_direction(Y, S);
    const CMat E = Y - Y * pinv_wide(S) * S;
    // p = (cos a, e^{i phi} sin a) covers the unit sphere in C^2 up to a phase
    double best = 1e300;
    const int N = 400;
    for (int ia = 0; ia <= N; ++ia) {
      const double a = std::numbers::pi / 2 * ia / N;
      for (int ip = 0; ip < N; ++ip) {
        const double phi = 2 * std::numbers::pi * ip / N;
        CVec p(2);
        p << std::cos(a), std::polar(std::sin(a), phi);
        const double v = (E - p * (p.adjoint() * E)).squaredNorm();
        best = std::min(best, v);
      }
    }
    CHECK(m.value <= best + 1e-12);
    CHECK(m.value == doctest::Approx(best).epsilon(1e-4));
    CHECK((E - m.p.vec() * (m.p.vec().adjoint() * E)).squaredNorm() == doctest::Approx(m.value).epsilon(1e-10));
  }
}

TEST_CASE("Theorem 1 on a tiny noiseless system") {
  const SystemConfig cfg = cfg_of(6, 2, 2, 3);
  JammerProfile jp;
  Rng rng(4);
  const Theorem1Report rep = verify_theorem1(cfg, jp, 20, rng);
  CHECK(rep.trials == 20);
  CHECK(rep.eclipsed_skipped == 0);
  CHECK(rep.unique_recoveries == 20);
  CHECK(rep.collinear == 20);
  CHECK(rep.channel_recovered == 20);
  CHECK(rep.all_passed());
  CHECK(rep.max_true_objective < 1e-20);
  CHECK(rep.min_wrong_objective > 1e-6);
  CHECK(rep.candidates_per_trial == 4096);
  CHECK(rep.to_json().find("\"unique_recoveries\"") != std::string::npos);

  SUBCASE("eclipsed draws are reported, not asserted") {
    JammerProfile dd;
    dd.kind = JammerKind::DataDependent;
    const Theorem1Report r = verify_theorem1(cfg, dd, 5, rng);
    CHECK(r.eclipsed_skipped == 5);
    CHECK(r.all_passed());
  }
  SUBCASE("too large") {
    CHECK_THROWS_AS(verify_theorem1(cfg_of(16, 4, 4, 12), jp, 1, rng), Error);
  }
}

TEST_CASE("phase-shifted directions give the same objective") {
  Rng rng(5);
  const CMat E = testutil::random_cmat(rng, 4, 7);
  const CVec p = testutil::random_cvec(rng, 4).normalized();
  const CVec q = std::polar(1.0, 1.234) * p;
  const double a = (E - p * (p.adjoint() * E)).squaredNorm();
  const double b = (E - q * (q.adjoint() * E)).squaredNorm();
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("eclipse bound") {
  CHECK(eclipse_bound_log10(4, 4, 20) == doctest::Approx(-8.0 * std::log10(4.0)).epsilon(1e-15));
  CHECK(std::abs(eclipse_bound_log10(4, 4, 20) - (-4.816)) < 1e-3);
  CHECK(std::pow(10.0, eclipse_bound_log10(4, 4, 20)) == doctest::Approx(1.52587890625e-5).epsilon(1e-12));
  CHECK(std::pow(10.0, eclipse_bound_log10(4, 4, 20)) <= 1.6e-5);
  CHECK(eclipse_bound_log10(16, 32, 128) == doctest::Approx((96.0 - 3712.0) * std::log10(16.0)).epsilon(1e-14));
  CHECK(std::abs(eclipse_bound_log10(16, 32, 128) - (-4354.1)) < 0.05);
  CHECK(eclipse_bound_log10(4, 2, 0) == doctest::Approx(6.0 * std::log10(4.0)));
  CHECK(eclipse_bound_log10(4, 2, 0) > 0.0);
  for (int D = 1; D < 50; ++D) CHECK(eclipse_bound_log10(4, 5, D + 1) < eclipse_bound_log10(4, 5, D));
}
