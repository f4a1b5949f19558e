#include "smartjam/numerics.hpp"

#include "smartjam/error.hpp"

#include <cmath>
#include <string>

namespace smartjam {

UnitVec UnitVec::normalized(const CVec& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::InvalidArgument, "UnitVec: cannot normalize a zero or non-finite vector");
  }
  return UnitVec(v / n);
}

UnitVec UnitVec::basis(Eigen::Index dim, Eigen::Index index) {
  CVec e = CVec::Zero(dim);
  e(index) = 1.0;
  return UnitVec(std::move(e));
}

namespace {

// Gram inverse via the Hermitian eigendecomposition so conditioning is visible.
CMat gram_inverse(const CMat& G, bool guarded) {
  Eigen::SelfAdjointEigenSolver<CMat> es(G);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::RankDeficient, "pinv_wide: eigensolver failed on S S^H");
  }
  const RVec& ev = es.eigenvalues();
  const double lmax = ev.maxCoeff();
  const double lmin = ev.minCoeff();
  if (!(lmax > 0.0) || lmin <= lmax * 1e-12) {
    if (!guarded) {
      throw Error(ErrorKind::RankDeficient,
                  "pinv_wide: S S^H is singular or ill-conditioned (cond > 1e12)");
    }
    const double ridge = 1e-9 * std::max(G.real().trace(), 1e-300);
    CMat Gr = G;
    Gr.diagonal().array() += ridge;
    return Gr.llt().solve(CMat::Identity(G.rows(), G.cols()));
  }
  return es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
}

CMat pinv_impl(const CMat& S, bool guarded) {
  if (S.rows() > S.cols()) {
    throw Error(ErrorKind::RankDeficient, "pinv_wide: matrix is tall (" + std::to_string(S.rows()) +
                                              "x" + std::to_string(S.cols()) + "), cannot have full row rank");
  }
  const CMat G = S * S.adjoint();
  return S.adjoint() * gram_inverse(G, guarded);
}

}  // namespace

CMat pinv_wide(const CMat& S) { return pinv_impl(S, false); }

CMat pinv_wide_guarded(const CMat& S) { return pinv_impl(S, true); }

CMat ortho_projector(const UnitVec& p) {
  const CVec& v = p.vec();
  return CMat::Identity(v.size(), v.size()) - v * v.adjoint();
}

CMat project_out(const UnitVec& p, const CMat& X) {
  const CVec& v = p.vec();
  return X - v * (v.adjoint() * X);
}

CVec canonical_phase(const CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > 1e-12) {
      return v * (std::conj(v(i)) / a);
    }
  }
  return v;
}

namespace {

void require_hermitian(const CMat& A, const char* who) {
  if (A.rows() != A.cols()) {
    throw Error(ErrorKind::Shape, std::string(who) + ": matrix is not square");
  }
  const double scale = std::max(1.0, A.norm());
  if ((A - A.adjoint()).norm() > 1e-10 * scale) {
    throw Error(ErrorKind::Shape, std::string(who) + ": matrix is not Hermitian");
  }
}

}  // namespace

UnitVec dominant_eigvec(const CMat& A) {
  require_hermitian(A, "dominant_eigvec");
  const CMat H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  // Eigen sorts eigenvalues ascending.
  CVec v = es.eigenvectors().col(H.rows() - 1);
  v /= v.norm();
  return UnitVec::unchecked(canonical_phase(v));
}

double max_eigenvalue(const CMat& A) {
  require_hermitian(A, "max_eigenvalue");
  const CMat H = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(H.rows() - 1);
}

PowerStep power_iter_step(const CMat& E, const UnitVec& p_prev) {
  const CVec q = E * (E.adjoint() * p_prev.vec());
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    return {p_prev, true};
  }
  return {UnitVec::unchecked(q / n), false};
}

double real_inner(const CMat& A, const CMat& B) {
  return (A.array().conjugate() * B.array()).real().sum();
}

int numerical_rank(const CMat& A, double rel_tol, double abs_tol) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(A);
  const RVec& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= abs_tol) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_tol * s(0)) ++r;
  }
  return r;
}

bool all_finite(const CMat& A) { return A.allFinite(); }

}  // namespace smartjam
