#include "kgkrein/linalg.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "kgkrein/errors.hpp"

namespace kg {

HermEig herm_eig(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::structural, "hermitian eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

GenEig general_eig(const Matrix& a) {
  GenEig out;
  if (a.size() > 0 && a.imag().cwiseAbs().maxCoeff() == 0.0) {
    // Real path: real Schur keeps conjugate pairs exactly symmetric.
    Eigen::EigenSolver<RealMatrix> es(a.real(), /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
      throw Error(ErrorKind::structural, "real eigensolver failed");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<Matrix> es(a, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
      throw Error(ErrorKind::structural, "complex eigensolver failed");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  }
  // Column-normalized already; invert for the similarity transform.
  Eigen::PartialPivLU<Matrix> lu(out.vectors);
  out.vectors_inv = lu.solve(Matrix::Identity(a.rows(), a.cols()));
  if (out.vectors_inv.allFinite()) {
    out.basis_cond = spectral_norm(out.vectors) * spectral_norm(out.vectors_inv);
  } else {
    // Defective input: no eigenbasis. Classification still works through
    // contour projections; oracle-type callers must check basis_cond.
    out.basis_cond = std::numeric_limits<double>::infinity();
  }
  return out;
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

Matrix herm_func(const Matrix& a, const std::function<double(double)>& f) {
  HermEig e = herm_eig(a);
  RealVector fv(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) fv[i] = f(e.values[i]);
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

Matrix sqrt_psd(const Matrix& a, double clip) {
  HermEig e = herm_eig(a);
  if (e.values.size() > 0 && e.values.minCoeff() < -clip)
    throw Error(ErrorKind::splitting,
                "matrix is not positive semi-definite (min eig " +
                    std::to_string(e.values.minCoeff()) + ")",
                e.values.minCoeff());
  RealVector fv(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    fv[i] = e.values[i] > 0 ? std::sqrt(e.values[i]) : 0.0;
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

Matrix pinv_psd(const Matrix& a, double cutoff) {
  HermEig e = herm_eig(a);
  RealVector fv(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    fv[i] = std::abs(e.values[i]) > cutoff ? 1.0 / e.values[i] : 0.0;
  return e.vectors * fv.asDiagonal() * e.vectors.adjoint();
}

Matrix abs_power(const Matrix& a, double s) {
  return herm_func(a, [s](double x) { return std::pow(std::abs(x), s); });
}

Matrix japanese_power(const Matrix& a, double s) {
  return herm_func(
      a, [s](double x) { return std::pow(x * x + 1.0, 0.5 * s); });
}

namespace {

double power_iterate(const Matrix& a, Vector v) {
  const int iters = 120;
  double lam = 0.0;
  v.normalize();
  for (int it = 0; it < iters; ++it) {
    Vector w = a.adjoint() * (a * v);
    double nw = w.norm();
    if (nw == 0.0) return 0.0;
    double next = std::sqrt(nw);
    w /= nw;
    if (it > 16 && std::abs(next - lam) <= 1e-12 * std::max(1.0, next)) {
      return next;
    }
    lam = next;
    v = w;
  }
  return lam;
}

} // namespace

double spectral_norm(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (a.rows() <= 32 && a.cols() <= 32) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
  }
  // Deterministic starts: all-ones and an alternating vector.
  Vector v1 = Vector::Ones(a.cols());
  Vector v2(a.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    v2[i] = Complex((i % 2) ? -1.0 : 1.0, (i % 3) ? 0.5 : -0.5);
  return std::max(power_iterate(a, v1), power_iterate(a, v2));
}

double smallest_sv(const Matrix& a) {
  if (a.rows() != a.cols())
    throw Error(ErrorKind::input, "smallest_sv expects a square matrix");
  if (a.rows() == 0) return 0.0;
  if (a.rows() <= 32) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(svd.singularValues().size() - 1);
  }
  Eigen::PartialPivLU<Matrix> lu(a);
  Eigen::PartialPivLU<Matrix> lua(a.adjoint().eval());
  Vector v = Vector::Ones(a.cols()).normalized();
  double lam = 0.0;
  for (int it = 0; it < 80; ++it) {
    Vector w = lu.solve(lua.solve(v));
    double nw = w.norm();
    if (!std::isfinite(nw) || nw == 0.0) return 0.0;
    double next = 1.0 / std::sqrt(nw);
    w /= nw;
    if (it > 10 && std::abs(next - lam) <= 1e-12 * std::max(next, 1e-300)) {
      return next;
    }
    lam = next;
    v = w;
  }
  return lam;
}

double cond_2(const Matrix& a) {
  double lo = smallest_sv(a);
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return spectral_norm(a) / lo;
}

GramChol::GramChol(const Matrix& gram) {
  Eigen::LLT<Matrix> llt(hermitian_part(gram));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::structural,
                "gram matrix is not positive definite (Cholesky failed)");
  lower = llt.matrixL();
}

Matrix GramChol::weight_left(const Matrix& a) const {
  return lower.adjoint() * a;
}

Matrix GramChol::unweight_right(const Matrix& a) const {
  // a L^{-*}: solve X L^* = a  <=>  L X^* = a^*.
  Matrix xa = lower.triangularView<Eigen::Lower>().solve(a.adjoint());
  return xa.adjoint();
}

double op_norm(const Matrix& a, const GramChol& from, const GramChol& to) {
  return spectral_norm(to.weight_left(from.unweight_right(a)));
}

Matrix range_basis(const Matrix& a, double tol) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return Matrix(a.rows(), 0);
  int r = 0;
  while (r < sv.size() && sv(r) > tol * sv(0)) ++r;
  return svd.matrixU().leftCols(r);
}

int rank_of(const Matrix& a, double abs_cutoff) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  int r = 0;
  while (r < sv.size() && sv(r) > abs_cutoff) ++r;
  return r;
}

LineFit fit_line(const RealVector& x, const RealVector& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorKind::sampling, "fit_line needs at least 2 samples");
  const double n = static_cast<double>(x.size());
  double mx = x.mean(), my = y.mean();
  double sxx = (x.array() - mx).square().sum();
  if (sxx == 0.0) throw Error(ErrorKind::sampling, "degenerate abscissae");
  double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  RealVector r = y - (f.slope * x.array() + f.intercept).matrix();
  f.residual = std::sqrt(r.squaredNorm() / n);
  return f;
}

} // namespace kg
