#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smartjam/error.hpp"
#include "smartjam/numerics.hpp"
#include "smartjam/scenario.hpp"
#include "test_util.hpp"

using namespace smartjam;
using testutil::random_cmat;
using testutil::rel_err;

TEST_CASE("pinv_wide of the identity is the identity") {
  const CMat I = CMat::Identity(2, 2);
  CHECK(rel_err(pinv_wide(I), I) < 1e-14);
}

TEST_CASE("pinv_wide of H32 is H32^T / 32") {
  const CMat H = hadamard(32);
  const CMat P = pinv_wide(H);
  CHECK(rel_err(P, H.transpose() / 32.0) < 1e-12);
  CHECK(rel_err(H * P, CMat::Identity(32, 32)) < 1e-12);
}

TEST_CASE("Penrose identities on random full-rank wide matrices") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const CMat S = random_cmat(rng, 4, 10);
    const CMat X = pinv_wide(S);
    REQUIRE(X.rows() == 10);
    REQUIRE(X.cols() == 4);
    CHECK((S * X * S - S).norm() <= 1e-10 * S.norm());
    CHECK((X * S * X - X).norm() <= 1e-10 * X.norm());
    const CMat SX = S * X, XS = X * S;
    CHECK((SX - SX.adjoint()).norm() <= 1e-10 * SX.norm());
    CHECK((XS - XS.adjoint()).norm() <= 1e-10 * XS.norm());
  }
}

TEST_CASE("pinv_wide rejects rank-deficient and tall input") {
  CMat S(2, 4);
  S.row(0) << 1, 2, 3, 4;
  S.row(1) = 2.0 * S.row(0);
  try {
    (void)pinv_wide(S);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RankDeficient);
  }
  CHECK_THROWS_AS((void)pinv_wide(CMat::Ones(4, 2)), Error);
}

TEST_CASE("pinv_wide_guarded stays finite on rank-deficient input") {
  CMat S = CMat::Zero(2, 3);
  S(0, 0) = 1.0;
  const CMat X = pinv_wide_guarded(S);
  CHECK(all_finite(X));
  CHECK(std::abs(X(0, 0) - cplx(1.0)) < 1e-6);
}

TEST_CASE("ortho_projector examples and algebra") {
  SUBCASE("p = e1 in C^3 gives diag(0, 1, 1)") {
    const CMat P = ortho_projector(UnitVec::basis(3, 0));
    CMat expect = CMat::Zero(3, 3);
    expect(1, 1) = 1.0;
    expect(2, 2) = 1.0;
    CHECK((P - expect).norm() < 1e-15);
  }
  SUBCASE("random p") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      const int B = 2 + trial;
      const UnitVec p = UnitVec::normalized(testutil::random_cvec(rng, B));
      const CMat P = ortho_projector(p);
      CHECK(std::abs(P.trace() - cplx(B - 1.0)) < 1e-12);
      CHECK((P * P - P).norm() <= 1e-12);
      CHECK((P - P.adjoint()).norm() <= 1e-12);
      CHECK((P * p.vec()).norm() <= 1e-12);
      const CMat X = random_cmat(rng, B, 5);
      CHECK((project_out(p, X) - P * X).norm() <= 1e-12 * X.norm());
    }
  }
}

TEST_CASE("UnitVec normalizes and rejects zero") {
  CVec v(3);
  v << 3.0, 0.0, cplx(0.0, 4.0);
  const UnitVec u = UnitVec::normalized(v);
  CHECK(std::abs(u.vec().norm() - 1.0) <= 1e-12);
  CHECK_THROWS_AS(UnitVec::normalized(CVec::Zero(3)), Error);
}

TEST_CASE("dominant_eigvec examples") {
  SUBCASE("diag(3, 1) gives e1 with canonical phase") {
    CMat A = CMat::Zero(2, 2);
    A(0, 0) = 3.0;
    A(1, 1) = 1.0;
    const UnitVec v = dominant_eigvec(A);
    CHECK(std::abs(v.vec()(0) - cplx(1.0)) < 1e-12);
    CHECK(std::abs(v.vec()(1)) < 1e-12);
  }
  SUBCASE("v v^H + 0.1 I gives v up to phase") {
    Rng rng(3);
    const CVec v = testutil::random_cvec(rng, 8).normalized();
    const CMat A = v * v.adjoint() + 0.1 * CMat::Identity(8, 8);
    const UnitVec u = dominant_eigvec(A);
    CHECK(std::abs(testutil::abs_cosine(u.vec(), v) - 1.0) < 1e-8);
    CHECK(u.vec()(0).real() >= 0.0);
    CHECK(std::abs(u.vec()(0).imag()) < 1e-12);
  }
  SUBCASE("degenerate top eigenvalue returns a unit vector of the eigenspace") {
    CMat A = CMat::Zero(3, 3);
    A(0, 0) = 2.0;
    A(1, 1) = 2.0;
    A(2, 2) = 1.0;
    const UnitVec u = dominant_eigvec(A);
    CHECK(std::abs(u.vec().norm() - 1.0) < 1e-12);
    CHECK(std::abs(u.vec()(2)) < 1e-10);
  }
  SUBCASE("residual and Rayleigh quotient on random PSD input") {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
      const CMat X = random_cmat(rng, 12, 20);
      const CMat A = X * X.adjoint();
      const UnitVec u = dominant_eigvec(A);
      const double lambda = max_eigenvalue(A);
      CHECK((A * u.vec() - lambda * u.vec()).norm() <= 1e-8 * A.norm());
      CHECK(std::abs(u.vec().dot(A * u.vec()).real() - lambda) <= 1e-9 * lambda);
    }
  }
  SUBCASE("non-Hermitian input is a shape error") {
    CMat A = CMat::Identity(2, 2);
    A(0, 1) = 1.0;
    try {
      (void)dominant_eigvec(A);
      FAIL("expected Shape");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Shape);
    }
    CHECK_THROWS_AS((void)dominant_eigvec(CMat::Ones(2, 3)), Error);
  }
}

TEST_CASE("power_iter_step examples") {
  SUBCASE("rank-one E collapses onto e1") {
    CMat E = CMat::Zero(3, 4);
    E(0, 0) = 1.0;
    CVec start = CVec::Zero(3);
    start(0) = start(1) = 1.0 / std::sqrt(2.0);
    const PowerStep s = power_iter_step(E, UnitVec::normalized(start));
    CHECK_FALSE(s.stalled);
    CHECK(std::abs(testutil::abs_cosine(s.p.vec(), UnitVec::basis(3, 0).vec()) - 1.0) < 1e-14);
  }
  SUBCASE("50 steps agree with the eigensolver") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      CMat E = random_cmat(rng, 10, 14);
      // make the gap generous so 50 steps suffice
      const CVec v = testutil::random_cvec(rng, 10);
      E += 3.0 * v * testutil::random_cvec(rng, 14).transpose();
      UnitVec p = UnitVec::normalized(testutil::random_cvec(rng, 10));
      for (int t = 0; t < 50; ++t) {
        PowerStep s = power_iter_step(E, p);
        CHECK(std::abs(s.p.vec().norm() - 1.0) <= 1e-12);
        p = s.p;
      }
      const UnitVec ref = dominant_eigvec(E * E.adjoint());
      const double c = std::min(1.0, testutil::abs_cosine(p.vec(), ref.vec()));
      CHECK(std::acos(c) <= 1e-6);
    }
  }
  SUBCASE("exact dominant vector is a fixed point") {
    Rng rng(6);
    const CMat E = random_cmat(rng, 6, 9);
    const UnitVec v = dominant_eigvec(E * E.adjoint());
    const PowerStep s = power_iter_step(E, v);
    CHECK(std::abs(testutil::abs_cosine(s.p.vec(), v.vec()) - 1.0) < 1e-12);
  }
  SUBCASE("zero product stalls and keeps the previous vector") {
    CMat E = CMat::Zero(3, 2);
    E(0, 0) = 1.0;
    const UnitVec p = UnitVec::basis(3, 2);
    const PowerStep s = power_iter_step(E, p);
    CHECK(s.stalled);
    CHECK((s.p.vec() - p.vec()).norm() == 0.0);
  }
}

TEST_CASE("numerical_rank and real_inner") {
  Rng rng(7);
  const CMat A = random_cmat(rng, 5, 3) * random_cmat(rng, 3, 6);
  CHECK(numerical_rank(A) == 3);
  CHECK(numerical_rank(CMat::Zero(3, 3)) == 0);
  const CMat X = random_cmat(rng, 3, 3), Y = random_cmat(rng, 3, 3);
  CHECK(std::abs(real_inner(X, Y) - (X.adjoint() * Y).trace().real()) < 1e-12);
}
