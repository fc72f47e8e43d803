#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kgkrein/linalg.hpp"
#include "kgkrein/types.hpp"

namespace kg {

// Finite-dimensional Krein space: an indefinite Hermitian form u* G v on
// C^n, carried together with a positive-definite topology Gram (the norm
// all B(.) estimates are measured in) and the fundamental symmetry J.
//
// J is the sign of the hilbert-self-adjoint operator M = hilbert^{-1} G,
// so J^2 = 1, and G = m_gram * J where m_gram = hilbert*|M| is the Gram
// of the equivalent scalar product. With the default hilbert = |G| this
// reduces to the usual polar pieces G = J|G|.
class KreinSpace {
public:
  static std::shared_ptr<const KreinSpace> make(Matrix gram);
  static std::shared_ptr<const KreinSpace> make(Matrix gram, Matrix hilbert);

  int dim() const { return static_cast<int>(gram_.rows()); }
  const Matrix& gram() const { return gram_; }
  const Matrix& hilbert_gram() const { return hilbert_; }
  const Matrix& m_gram() const { return m_gram_; }
  const Matrix& fundamental_symmetry() const { return j_; }
  const Matrix& gram_inv() const { return gram_inv_; }
  const GramChol& hilbert_chol() const { return hchol_; }
  double gram_cond() const { return gram_cond_; }
  int negative_rank() const { return neg_rank_; }

  Complex form(const Vector& u, const Vector& v) const {
    return u.dot(gram_ * v);
  }
  double hilbert_norm(const Vector& v) const {
    return std::sqrt(std::abs(v.dot(hilbert_ * v)));
  }
  // Operator norm in B(this) measured with the hilbert Gram.
  double bnorm(const Matrix& a) const { return op_norm(a, hchol_, hchol_); }

private:
  KreinSpace() = default;
  static std::shared_ptr<const KreinSpace> build(Matrix gram,
                                                 std::optional<Matrix> hilbert);

  Matrix gram_, hilbert_, m_gram_, j_, gram_inv_;
  GramChol hchol_;
  double gram_cond_ = 0.0;
  int neg_rank_ = 0;
};

using SpacePtr = std::shared_ptr<const KreinSpace>;

struct KreinOperator {
  Matrix mat;
  SpacePtr space;

  KreinOperator() = default;
  KreinOperator(Matrix m, SpacePtr s);
  int dim() const { return static_cast<int>(mat.rows()); }
};

KreinOperator krein_adjoint(const KreinOperator& a);
bool is_krein_selfadjoint(const KreinOperator& a, double tol = 1e-8);
int pontryagin_negative_rank(const KreinSpace& space);

// Real-coefficient polynomial, ascending coefficients.
struct Polynomial {
  std::vector<double> coeff;

  int degree() const { return static_cast<int>(coeff.size()) - 1; }
  double eval(double x) const;
  Complex eval(Complex z) const;
  Matrix eval(const Matrix& a) const;  // Horner
  Polynomial operator*(const Polynomial& o) const;
  Polynomial scaled(double c) const;
  std::string to_string() const;

  static Polynomial one() { return {{1.0}}; }
  static Polynomial monic_linear(double root) { return {{-root, 1.0}}; }
  // (x - l)(x - conj(l)) for a complex root pair.
  static Polynomial conj_pair(Complex l);
};

struct SpectrumClassification {
  struct RealPoint {
    double value = 0.0;
    int multiplicity = 0;
    int riesz_index = 1;
    // Inertia of the Krein form compressed to the Riesz subspace.
    int form_pos = 0, form_neg = 0, form_null = 0;
    bool critical() const {
      return riesz_index >= 2 || form_neg > 0 || form_null > 0;
    }
  };
  struct ConjPair {
    Complex lambda;        // Im > 0
    Complex partner;       // computed partner, approx conj(lambda)
    int multiplicity = 0;  // per member
    int riesz_index = 1;
  };

  std::vector<RealPoint> real_points;
  std::vector<ConjPair> pairs;
  double pairing_residual = 0.0;
  double basis_cond = 0.0;  // eigenvector condition number of the solve
  bool selfadjoint_certified = false;

  std::vector<double> critical_candidates() const;
  double max_imag() const;
};

// Spectral classification with conjugate pairing. pair_tol bounds the
// accepted |lambda - conj(partner)|; a larger mismatch on a certified
// Krein-self-adjoint operator raises ErrorKind::consistency.
SpectrumClassification classify_spectrum(const KreinOperator& a,
                                         double pair_tol = kPairTolDefault);

// Riesz spectral projection (1/2pi i) ∮ (z-A)^{-1} dz over a circle around
// lambda. radius <= 0 picks half the gap to the rest of the spectrum.
Matrix riesz_projection(const KreinOperator& a, Complex lambda,
                        double radius = 0.0, int n_quad = 64);

// Projection onto the span of all non-real Riesz subspaces,
// sum of E(lambda) + E(conj lambda) over pairs with Im > 0.
Matrix pp_projection(const KreinOperator& a);

struct DefinitizingCheck {
  bool positive = false;
  double min_form_eig = 0.0;
};
DefinitizingCheck verify_definitizing(const KreinOperator& a,
                                      const Polynomial& p);

struct DefinitizingCandidate {
  Polynomial poly;
  bool verified = false;
  double min_form_eig = 0.0;
};
// Candidate family built from the classified spectrum: the conjugate-pair
// product p0, then sign flips, a linear factor, and squared factors at
// detected critical candidates. Ordered by degree.
std::vector<DefinitizingCandidate> suggest_definitizing(
    const KreinOperator& a);

// Cached Hermitian eigendecomposition of a scalar operator h, serving the
// Sobolev-scale powers <h>^s and |h|^s.
class OperatorScale {
public:
  OperatorScale() = default;
  explicit OperatorScale(const Matrix& h);

  const Matrix& base() const { return h_; }
  const RealVector& eigenvalues() const { return eig_.values; }
  double min_abs_eig() const;
  // |s| <= 1; homogeneous = |h|^s (requires trivial kernel),
  // otherwise <h>^s = (h^2+1)^{s/2}.
  Matrix power(double s, bool homogeneous) const;

private:
  Matrix h_;
  HermEig eig_;
};

Matrix operator_power(const OperatorScale& scale, double s, bool homogeneous);

} // namespace kg
