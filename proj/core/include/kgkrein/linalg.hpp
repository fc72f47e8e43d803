#pragma once

#include <functional>

#include "kgkrein/types.hpp"

namespace kg {

// Eigendecomposition of a Hermitian matrix (input symmetrized first).
struct HermEig {
  RealVector values;  // ascending
  Matrix vectors;     // unitary
};
HermEig herm_eig(const Matrix& a);

// General (non-normal safe) eigendecomposition with the eigenvector basis
// condition number attached.
struct GenEig {
  Vector values;
  Matrix vectors;
  Matrix vectors_inv;
  double basis_cond;
};
GenEig general_eig(const Matrix& a);

Matrix hermitian_part(const Matrix& a);

// f applied through the eigendecomposition of a Hermitian matrix.
Matrix herm_func(const Matrix& a, const std::function<double(double)>& f);

// PSD square root; eigenvalues in [-clip, 0) are clipped to 0, anything
// below -clip throws ErrorKind::splitting.
Matrix sqrt_psd(const Matrix& a, double clip);

// Pseudo-inverse of a Hermitian PSD matrix, eigenvalues below cutoff dropped.
Matrix pinv_psd(const Matrix& a, double cutoff);

// |a|^s resp. (a^2+1)^{s/2} for Hermitian a.
Matrix abs_power(const Matrix& a, double s);
Matrix japanese_power(const Matrix& a, double s);  // <a>^s

// Largest singular value by power iteration on A*A (deterministic start,
// two orthogonal restarts). Accurate to ~1e-10 relative for desk sizes.
double spectral_norm(const Matrix& a);

// Smallest singular value via inverse iteration on the LU factors.
// Returns 0 for numerically singular input.
double smallest_sv(const Matrix& a);

// Condition number estimate sigma_max/sigma_min.
double cond_2(const Matrix& a);

// Cholesky factor wrapper for Gram-weighted operator norms.
// G = L L^*; the B(X,Y) norm of A is ||L_Y^* A L_X^{-*}||_2.
struct GramChol {
  Matrix lower;  // L
  GramChol() = default;
  explicit GramChol(const Matrix& gram);
  Matrix weight_left(const Matrix& a) const;    // L^* a
  Matrix unweight_right(const Matrix& a) const; // a L^{-*}
};
double op_norm(const Matrix& a, const GramChol& from, const GramChol& to);

// Numerically orthonormal basis of the column span of a, rank cut at
// tol relative to the largest singular value.
Matrix range_basis(const Matrix& a, double tol);

int rank_of(const Matrix& a, double abs_cutoff);

// Linear least-squares fit y = slope*x + intercept.
struct LineFit {
  double slope;
  double intercept;
  double residual;  // rms residual
};
LineFit fit_line(const RealVector& x, const RealVector& y);

} // namespace kg
