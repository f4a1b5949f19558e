#pragma once

#include <Eigen/Dense>

#include <complex>

namespace smartjam {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

/// A complex vector of unit 2-norm. Construction normalizes; use `unchecked`
/// only when the caller already guarantees |norm - 1| <= 1e-12.
class UnitVec {
 public:
  static UnitVec normalized(const CVec& v);
  static UnitVec unchecked(CVec v) { return UnitVec(std::move(v)); }
  static UnitVec basis(Eigen::Index dim, Eigen::Index index);

  const CVec& vec() const noexcept { return v_; }
  Eigen::Index dim() const noexcept { return v_.size(); }

 private:
  explicit UnitVec(CVec v) : v_(std::move(v)) {}
  CVec v_;
};

/// S^H (S S^H)^{-1} for a wide matrix of full row rank. Throws RankDeficient.
CMat pinv_wide(const CMat& S);

/// Same as pinv_wide, but when cond(S S^H) exceeds 1e12 a ridge of
/// 1e-9 * trace(S S^H) is added instead of failing.
CMat pinv_wide_guarded(const CMat& S);

/// I - p p^H.
CMat ortho_projector(const UnitVec& p);

/// Applies (I - p p^H) to X without forming the B x B projector.
CMat project_out(const UnitVec& p, const CMat& X);

/// Unit eigenvector of the largest eigenvalue of a Hermitian matrix. The first
/// entry with magnitude above 1e-12 is rotated to be real and nonnegative. For a
/// repeated top eigenvalue any unit vector of that eigenspace is returned.
/// Throws Shape if A is not square or not Hermitian to 1e-10 (relative).
UnitVec dominant_eigvec(const CMat& A);

/// Largest eigenvalue of a Hermitian matrix.
double max_eigenvalue(const CMat& A);

struct PowerStep {
  UnitVec p;
  bool stalled = false;
};

/// One power iteration on E E^H started at p_prev. If E E^H p_prev vanishes the
/// previous vector is returned with `stalled` set.
PowerStep power_iter_step(const CMat& E, const UnitVec& p_prev);

/// Rotates v so its first entry with magnitude > 1e-12 is real nonnegative.
CVec canonical_phase(const CVec& v);

/// Re<A, B> = Re trace(A^H B).
double real_inner(const CMat& A, const CMat& B);

/// Numerical rank from singular values: count of sigma_i > rel_tol * sigma_1
/// (zero when sigma_1 <= abs_tol).
int numerical_rank(const CMat& A, double rel_tol = 1e-9, double abs_tol = 1e-12);

/// All entries finite.
bool all_finite(const CMat& A);

}  // namespace smartjam
