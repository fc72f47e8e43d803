#include "kgkrein/krein.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "kgkrein/errors.hpp"

namespace kg {

namespace {

constexpr double kEps = 2.220446049250313e-16;

double spectrum_scale(const Vector& eigs) {
  double s = 1.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    s = std::max(s, std::abs(eigs[i]));
  return s;
}

} // namespace

// ---------------------------------------------------------------------------
// KreinSpace
// ---------------------------------------------------------------------------

std::shared_ptr<const KreinSpace> KreinSpace::make(Matrix gram) {
  return build(std::move(gram), std::nullopt);
}

std::shared_ptr<const KreinSpace> KreinSpace::make(Matrix gram,
                                                   Matrix hilbert) {
  return build(std::move(gram), std::move(hilbert));
}

std::shared_ptr<const KreinSpace> KreinSpace::build(
    Matrix gram, std::optional<Matrix> hilbert) {
  if (gram.rows() != gram.cols() || gram.rows() == 0)
    throw Error(ErrorKind::structural, "gram must be square and non-empty");
  double gn = spectral_norm(gram);
  if ((gram - gram.adjoint()).norm() > 1e-12 * std::max(1.0, gn))
    throw Error(ErrorKind::structural, "gram must be Hermitian");

  auto sp = std::shared_ptr<KreinSpace>(new KreinSpace());
  sp->gram_ = hermitian_part(gram);

  HermEig ge = herm_eig(sp->gram_);
  double lo = ge.values.cwiseAbs().minCoeff();
  double hi = ge.values.cwiseAbs().maxCoeff();
  if (lo <= 0.0 || hi / lo > kGramCondLimit)
    throw Error(ErrorKind::structural,
                "gram is singular or too ill-conditioned (cond > 1e12)",
                lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo);
  sp->gram_cond_ = hi / lo;

  if (hilbert) {
    if (hilbert->rows() != gram.rows() || hilbert->cols() != gram.cols())
      throw Error(ErrorKind::structural, "hilbert gram dimension mismatch");
    sp->hilbert_ = hermitian_part(*hilbert);
  } else {
    RealVector av = ge.values.cwiseAbs();
    sp->hilbert_ = ge.vectors * av.asDiagonal() * ge.vectors.adjoint();
  }
  sp->hchol_ = GramChol(sp->hilbert_);

  // M = hilbert^{-1} gram, diagonalized in the hilbert geometry.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(sp->gram_,
                                                       sp->hilbert_);
  if (ges.info() != Eigen::Success)
    throw Error(ErrorKind::structural, "generalized eigensolver failed");
  const RealVector& lam = ges.eigenvalues();
  const Matrix& x = ges.eigenvectors();  // x^* hilbert x = I
  RealVector sgn(lam.size()), absv(lam.size());
  int nneg = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    sgn[i] = lam[i] >= 0 ? 1.0 : -1.0;
    absv[i] = std::abs(lam[i]);
    if (lam[i] < 0) ++nneg;
  }
  Matrix xinv = x.adjoint() * sp->hilbert_;
  sp->j_ = x * sgn.asDiagonal() * xinv;
  sp->m_gram_ = sp->hilbert_ * x * absv.asDiagonal() * xinv;
  sp->m_gram_ = hermitian_part(sp->m_gram_);
  sp->neg_rank_ = nneg;

  Eigen::PartialPivLU<Matrix> lu(sp->gram_);
  sp->gram_inv_ = lu.solve(Matrix::Identity(gram.rows(), gram.cols()));
  return sp;
}

KreinOperator::KreinOperator(Matrix m, SpacePtr s)
    : mat(std::move(m)), space(std::move(s)) {
  if (!space) throw Error(ErrorKind::structural, "operator needs a space");
  if (mat.rows() != mat.cols() || mat.rows() != space->dim())
    throw Error(ErrorKind::structural,
                "operator dimensions do not match its space");
}

KreinOperator krein_adjoint(const KreinOperator& a) {
  return KreinOperator(a.space->gram_inv() * a.mat.adjoint() * a.space->gram(),
                       a.space);
}

bool is_krein_selfadjoint(const KreinOperator& a, double tol) {
  KreinOperator ad = krein_adjoint(a);
  double an = a.mat.norm();
  return (ad.mat - a.mat).norm() <= tol * std::max(1.0, an);
}

int pontryagin_negative_rank(const KreinSpace& space) {
  return space.negative_rank();
}

// ---------------------------------------------------------------------------
// Polynomial
// ---------------------------------------------------------------------------

double Polynomial::eval(double x) const {
  double r = 0.0;
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) r = r * x + *it;
  return r;
}

Complex Polynomial::eval(Complex z) const {
  Complex r = 0.0;
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) r = r * z + *it;
  return r;
}

Matrix Polynomial::eval(const Matrix& a) const {
  if (coeff.empty())
    throw Error(ErrorKind::input, "empty polynomial");
  for (double c : coeff)
    if (!std::isfinite(c))
      throw Error(ErrorKind::input, "polynomial coefficients must be finite");
  const Eigen::Index n = a.rows();
  Matrix r = Matrix::Zero(n, n);
  for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) {
    r = r * a;
    r.diagonal().array() += *it;
  }
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out;
  out.coeff.assign(coeff.size() + o.coeff.size() - 1, 0.0);
  for (size_t i = 0; i < coeff.size(); ++i)
    for (size_t j = 0; j < o.coeff.size(); ++j)
      out.coeff[i + j] += coeff[i] * o.coeff[j];
  return out;
}

Polynomial Polynomial::scaled(double c) const {
  Polynomial out = *this;
  for (double& v : out.coeff) v *= c;
  return out;
}

Polynomial Polynomial::conj_pair(Complex l) {
  return {{std::norm(l), -2.0 * l.real(), 1.0}};
}

std::string Polynomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < coeff.size(); ++i) {
    if (coeff[i] == 0.0 && coeff.size() > 1) continue;
    if (!first) os << (coeff[i] >= 0 ? " + " : " - ");
    else if (coeff[i] < 0) os << "-";
    os << std::abs(coeff[i]);
    if (i == 1) os << "*x";
    else if (i > 1) os << "*x^" << i;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------------------
// Spectrum classification
// ---------------------------------------------------------------------------

namespace {

struct Cluster {
  Complex value;
  int mult = 0;
  std::vector<int> members;
};

std::vector<Cluster> cluster_eigs(const Vector& eigs, double tol) {
  const int n = static_cast<int>(eigs.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(eigs[i] - eigs[j]) <= tol) parent[find(i)] = find(j);
  std::vector<Cluster> out;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    Cluster& c = out[slot[r]];
    c.members.push_back(i);
    c.mult += 1;
  }
  for (Cluster& c : out) {
    Complex s = 0.0;
    for (int m : c.members) s += eigs[m];
    c.value = s / static_cast<double>(c.mult);
  }
  std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
    if (a.value.real() != b.value.real())
      return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return out;
}

// Riesz projection given the precomputed spectrum.
Matrix riesz_from_spectrum(const Matrix& a, const Vector& eigs, Complex lambda,
                           double radius, int n_quad, double cluster_tol) {
  const Eigen::Index n = a.rows();
  if (radius <= 0.0) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
      double d = std::abs(eigs[i] - lambda);
      if (d > cluster_tol) gap = std::min(gap, d);
    }
    radius = std::isfinite(gap) ? 0.5 * gap
                                : std::max(1.0, 0.5 * spectrum_scale(eigs));
  }
  double min_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < eigs.size(); ++i)
    min_dist =
        std::min(min_dist, std::abs(std::abs(eigs[i] - lambda) - radius));
  if (min_dist < 0.02 * radius)
    throw Error(ErrorKind::contour,
                "integration circle passes too close to the spectrum",
                min_dist);
  Matrix acc = Matrix::Zero(n, n);
  for (int q = 0; q < n_quad; ++q) {
    double th = 2.0 * M_PI * (q + 0.5) / n_quad;
    Complex w = radius * std::exp(Complex(0.0, th));
    Complex z = lambda + w;
    Matrix zi = Matrix::Identity(n, n) * z - a;
    Eigen::PartialPivLU<Matrix> lu(zi);
    acc += w * lu.solve(Matrix::Identity(n, n));
  }
  return acc / static_cast<double>(n_quad);
}

struct ClusterDetail {
  int riesz_index = 1;
  int form_pos = 0, form_neg = 0, form_null = 0;
};

ClusterDetail cluster_detail(const KreinOperator& a, const Vector& eigs,
                             const GenEig& ge, const Cluster& c,
                             double cluster_tol, bool want_form) {
  ClusterDetail d;
  const double an = std::max(1.0, spectral_norm(a.mat));
  const double cutoff = 1e-8 * an;
  if (c.mult == 1) {
    if (want_form) {
      Vector v = ge.vectors.col(c.members[0]).normalized();
      double f = (v.dot(a.space->gram() * v)).real();
      double gn = spectral_norm(a.space->gram());
      if (std::abs(f) <= 1e-8 * gn) d.form_null = 1;
      else if (f > 0) d.form_pos = 1;
      else d.form_neg = 1;
    }
    return d;
  }
  Matrix e = riesz_from_spectrum(a.mat, eigs, c.value, 0.0, 64, cluster_tol);
  Matrix shifted = a.mat;
  shifted.diagonal().array() -= c.value;
  Matrix pw = e;
  int idx = c.mult;
  for (int j = 1; j <= c.mult; ++j) {
    pw = shifted * pw;
    if (rank_of(pw, cutoff) == 0) {
      idx = j;
      break;
    }
  }
  d.riesz_index = idx;
  if (want_form) {
    Matrix q = range_basis(e, 1e-8);
    Matrix cform = hermitian_part(q.adjoint() * a.space->gram() * q);
    HermEig fe = herm_eig(cform);
    double gn = spectral_norm(a.space->gram());
    for (Eigen::Index i = 0; i < fe.values.size(); ++i) {
      if (std::abs(fe.values[i]) <= 1e-8 * std::max(1.0, gn)) ++d.form_null;
      else if (fe.values[i] > 0) ++d.form_pos;
      else ++d.form_neg;
    }
  }
  return d;
}

} // namespace

SpectrumClassification classify_spectrum(const KreinOperator& a,
                                         double pair_tol) {
  GenEig ge = general_eig(a.mat);
  const double scale = spectrum_scale(ge.values);
  const double cluster_tol = 64.0 * std::sqrt(kEps) * scale;

  SpectrumClassification out;
  out.basis_cond = ge.basis_cond;
  out.selfadjoint_certified = is_krein_selfadjoint(a);

  std::vector<Cluster> clusters = cluster_eigs(ge.values, cluster_tol);
  std::vector<const Cluster*> upper, lower;
  for (const Cluster& c : clusters) {
    if (std::abs(c.value.imag()) <= cluster_tol) {
      ClusterDetail d = cluster_detail(a, ge.values, ge, c, cluster_tol, true);
      out.real_points.push_back({c.value.real(), c.mult, d.riesz_index,
                                 d.form_pos, d.form_neg, d.form_null});
    } else if (c.value.imag() > 0) {
      upper.push_back(&c);
    } else {
      lower.push_back(&c);
    }
  }

  std::vector<bool> used(lower.size(), false);
  double residual = 0.0;
  for (const Cluster* u : upper) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < lower.size(); ++i) {
      if (used[i]) continue;
      double d = std::abs(u->value - std::conj(lower[i]->value));
      if (d < bd) {
        bd = d;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) {
      residual = std::numeric_limits<double>::infinity();
      break;
    }
    used[best] = true;
    residual = std::max(residual, bd);
    ClusterDetail d = cluster_detail(a, ge.values, ge, *u, cluster_tol, false);
    out.pairs.push_back({u->value, lower[best]->value,
                         std::min(u->mult, lower[best]->mult), d.riesz_index});
  }
  for (size_t i = 0; i < lower.size(); ++i)
    if (!used[i]) residual = std::numeric_limits<double>::infinity();
  out.pairing_residual = out.pairs.empty() && residual == 0.0 ? 0.0 : residual;

  if (out.selfadjoint_certified && out.pairing_residual > pair_tol)
    throw Error(ErrorKind::consistency,
                "conjugate pairing failed on a Krein-self-adjoint operator",
                out.pairing_residual);
  return out;
}

std::vector<double> SpectrumClassification::critical_candidates() const {
  std::vector<double> out;
  for (const RealPoint& r : real_points)
    if (r.critical()) out.push_back(r.value);
  return out;
}

double SpectrumClassification::max_imag() const {
  double m = 0.0;
  for (const ConjPair& p : pairs) m = std::max(m, p.lambda.imag());
  return m;
}

Matrix riesz_projection(const KreinOperator& a, Complex lambda, double radius,
                        int n_quad) {
  GenEig ge = general_eig(a.mat);
  const double scale = spectrum_scale(ge.values);
  const double cluster_tol = 64.0 * std::sqrt(kEps) * scale;
  return riesz_from_spectrum(a.mat, ge.values, lambda, radius, n_quad,
                             cluster_tol);
}

Matrix pp_projection(const KreinOperator& a) {
  if (!is_krein_selfadjoint(a))
    throw Error(ErrorKind::precondition,
                "pp_projection requires a Krein-self-adjoint operator");
  GenEig ge = general_eig(a.mat);
  const double scale = spectrum_scale(ge.values);
  const double cluster_tol = 64.0 * std::sqrt(kEps) * scale;
  std::vector<Cluster> clusters = cluster_eigs(ge.values, cluster_tol);
  const Eigen::Index n = a.mat.rows();
  Matrix p = Matrix::Zero(n, n);
  for (const Cluster& c : clusters) {
    if (std::abs(c.value.imag()) <= cluster_tol) continue;
    p += riesz_from_spectrum(a.mat, ge.values, c.value, 0.0, 64, cluster_tol);
  }
  return p;
}

DefinitizingCheck verify_definitizing(const KreinOperator& a,
                                      const Polynomial& p) {
  Matrix gpa = a.space->gram() * p.eval(a.mat);
  double scale = spectral_norm(gpa);
  HermEig fe = herm_eig(hermitian_part(gpa));
  DefinitizingCheck out;
  out.min_form_eig = fe.values.minCoeff();
  out.positive = out.min_form_eig >= -1e-10 * std::max(1.0, scale);
  return out;
}

std::vector<DefinitizingCandidate> suggest_definitizing(
    const KreinOperator& a) {
  SpectrumClassification cls = classify_spectrum(a);

  Polynomial p0 = Polynomial::one();
  for (const auto& pr : cls.pairs) {
    Polynomial f = Polynomial::conj_pair(pr.lambda);
    for (int j = 0; j < pr.riesz_index; ++j) p0 = p0 * f;
  }

  std::vector<double> crit = cls.critical_candidates();
  std::vector<Polynomial> cands;
  auto push_signs = [&cands](const Polynomial& p) {
    cands.push_back(p);
    cands.push_back(p.scaled(-1.0));
  };
  push_signs(p0);
  push_signs(Polynomial{{0.0, 1.0}} * p0);
  Polynomial full = p0;
  for (double xi : crit) {
    Polynomial sq = Polynomial::monic_linear(xi) * Polynomial::monic_linear(xi);
    push_signs(sq * p0);
    full = full * sq;
  }
  if (crit.size() > 1) {
    push_signs(full);
    push_signs(Polynomial{{0.0, 1.0}} * full);
  }

  std::vector<DefinitizingCandidate> out;
  for (const Polynomial& p : cands) {
    DefinitizingCheck c = verify_definitizing(a, p);
    out.push_back({p, c.positive, c.min_form_eig});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const DefinitizingCandidate& x,
                      const DefinitizingCandidate& y) {
                     return x.poly.degree() < y.poly.degree();
                   });
  return out;
}

// ---------------------------------------------------------------------------
// OperatorScale
// ---------------------------------------------------------------------------

OperatorScale::OperatorScale(const Matrix& h) : h_(hermitian_part(h)) {
  if (h.rows() != h.cols())
    throw Error(ErrorKind::structural, "scale base must be square");
  if ((h - h.adjoint()).norm() > 1e-10 * std::max(1.0, h.norm()))
    throw Error(ErrorKind::structural, "scale base must be Hermitian");
  eig_ = herm_eig(h_);
}

double OperatorScale::min_abs_eig() const {
  return eig_.values.cwiseAbs().minCoeff();
}

Matrix OperatorScale::power(double s, bool homogeneous) const {
  if (std::abs(s) > 1.0)
    throw Error(ErrorKind::input, "operator power exponent must be in [-1,1]");
  RealVector fv(eig_.values.size());
  if (homogeneous) {
    double scale = std::max(1.0, eig_.values.cwiseAbs().maxCoeff());
    if (min_abs_eig() <= 1e-12 * scale)
      throw Error(ErrorKind::singularity,
                  "homogeneous power needs a trivial kernel", min_abs_eig());
    for (Eigen::Index i = 0; i < fv.size(); ++i)
      fv[i] = std::pow(std::abs(eig_.values[i]), s);
  } else {
    for (Eigen::Index i = 0; i < fv.size(); ++i)
      fv[i] = std::pow(eig_.values[i] * eig_.values[i] + 1.0, 0.5 * s);
  }
  return eig_.vectors * fv.asDiagonal() * eig_.vectors.adjoint();
}

Matrix operator_power(const OperatorScale& scale, double s, bool homogeneous) {
  return scale.power(s, homogeneous);
}

} // namespace kg
