#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "clid/signal.hpp"

namespace clid {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Strict stability margin: a discrete-time pole is accepted when |z| < 1 - kStabilityMargin.
inline constexpr double kStabilityMargin = 1e-8;

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct NonCausalInverse : std::runtime_error {
  NonCausalInverse()
      : std::runtime_error("constant term is zero (or singular); inverse would be non-causal") {}
};
struct PoleOnGrid : std::runtime_error {
  PoleOnGrid() : std::runtime_error("denominator vanishes at requested frequency") {}
};
struct IllPosedLoop : std::runtime_error {
  IllPosedLoop() : std::runtime_error("algebraic loop: I - G(inf)K(inf) is singular") {}
};
struct SingularConstantTerm : std::runtime_error {
  SingularConstantTerm()
      : std::runtime_error("polynomial matrix has singular constant-term block") {}
};

// ============================================================================
// Polynomials in the delay operator
// ============================================================================

/// Polynomial in z^-1 with real coefficients, ascending powers: c0 + c1 z^-1 + ...
/// Always holds at least one coefficient; trailing zeros are kept unless
/// trimmed() is called, so structural padding stays visible to callers.
class Polynomial {
 public:
  Polynomial() : c_{0.0} {}
  Polynomial(std::initializer_list<double> c);
  explicit Polynomial(std::vector<double> c);

  static Polynomial one() { return Polynomial({1.0}); }
  /// z^-k as a polynomial.
  static Polynomial delay(int k);

  int size() const { return static_cast<int>(c_.size()); }
  /// Index of the last exactly-nonzero coefficient (0 for the zero polynomial).
  int degree() const;
  /// Coefficient of z^-k; zero outside the stored range.
  double operator[](int k) const;
  const std::vector<double>& coeffs() const { return c_; }

  Polynomial trimmed() const;
  bool is_zero() const;

  /// Evaluate at w = z^-1 (Horner).
  Complex eval(Complex w) const;

 private:
  std::vector<double> c_;
};

Polynomial operator+(const Polynomial& a, const Polynomial& b);
Polynomial operator-(const Polynomial& a, const Polynomial& b);
Polynomial operator*(const Polynomial& a, const Polynomial& b);
Polynomial operator*(double c, const Polynomial& a);

// ============================================================================
// Rational transfer functions
// ============================================================================

/// Proper rational transfer function num(z^-1)/den(z^-1), normalized so that
/// den[0] = 1. Construction with den[0] = 0 is rejected.
class RationalTf {
 public:
  RationalTf() : num_({0.0}), den_({1.0}) {}  // the zero system
  RationalTf(Polynomial num, Polynomial den);

  static RationalTf constant(double g) { return RationalTf(Polynomial({g}), Polynomial::one()); }
  /// Finite impulse response c0 + c1 z^-1 + ... as a transfer function.
  static RationalTf fir(std::vector<double> coeffs) {
    return RationalTf(Polynomial(std::move(coeffs)), Polynomial::one());
  }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  /// True when the (trimmed) denominator is exactly 1.
  bool is_fir() const;

 private:
  Polynomial num_, den_;
};

RationalTf operator+(const RationalTf& a, const RationalTf& b);
RationalTf operator-(const RationalTf& a, const RationalTf& b);
RationalTf operator*(const RationalTf& a, const RationalTf& b);
RationalTf operator*(double c, const RationalTf& a);

/// Swap numerator and denominator. Throws NonCausalInverse when num[0] = 0.
RationalTf tf_inv(const RationalTf& f);

/// Evaluate at z = e^{j omega}. Throws PoleOnGrid when the denominator is
/// numerically zero there.
Complex freq_response(const RationalTf& f, double omega);

/// Roots of the denominator as a polynomial in z, on the convention that both
/// numerator and denominator are raised to the common degree
/// D = max(deg num, deg den) after removing trailing-zero padding. Relative
/// degree therefore shows up as poles (numerator excess) or zeros (denominator
/// excess) at the origin.
std::vector<Complex> poles(const RationalTf& f);
std::vector<Complex> zeros(const RationalTf& f);

bool is_stable(const RationalTf& f);

/// Cancel numerator/denominator root pairs that agree within tol. Never done
/// implicitly by the arithmetic above.
RationalTf reduce(const RationalTf& f, double tol = 1e-8);

/// Plain-text form:  "num: c0 c1 ...\nden: c0 c1 ...\n"
std::string to_text(const RationalTf& f);
RationalTf rational_from_text(const std::string& text);

// ============================================================================
// Transfer-function matrices
// ============================================================================

class TfMatrix {
 public:
  TfMatrix() : rows_(0), cols_(0) {}
  TfMatrix(int rows, int cols);

  static TfMatrix identity(int n);
  static TfMatrix zero(int rows, int cols) { return TfMatrix(rows, cols); }
  static TfMatrix from_scalar(const RationalTf& f);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  RationalTf& operator()(int i, int j) { return e_[static_cast<size_t>(i * cols_ + j)]; }
  const RationalTf& operator()(int i, int j) const {
    return e_[static_cast<size_t>(i * cols_ + j)];
  }

  /// Entry (0,0) of a 1x1 matrix.
  const RationalTf& scalar() const;

  /// Constant terms num[0] of every entry; the value of the matrix at z = inf.
  Matrix const_coeff() const;

 private:
  int rows_, cols_;
  std::vector<RationalTf> e_;
};

TfMatrix operator+(const TfMatrix& a, const TfMatrix& b);
TfMatrix operator-(const TfMatrix& a, const TfMatrix& b);
TfMatrix operator*(const TfMatrix& a, const TfMatrix& b);
TfMatrix operator*(const RationalTf& c, const TfMatrix& a);

/// Inverse by adjugate over the rational entries; intended for small matrices.
/// Throws NonCausalInverse when the constant term of the determinant vanishes.
TfMatrix tf_inv(const TfMatrix& f);

ComplexMatrix freq_response(const TfMatrix& f, double omega);
bool is_stable(const TfMatrix& f);

// ============================================================================
// Finite impulse response sequences
// ============================================================================

/// Matrix-valued finite impulse response M[0..tau-1], all blocks sharing one shape.
class FirSeq {
 public:
  FirSeq() = default;
  FirSeq(int tau, int rows, int cols);
  explicit FirSeq(std::vector<Matrix> blocks);

  static FirSeq from_scalar(const std::vector<double>& coeffs);
  /// Extract blocks from a matrix of FIR entries; throws DimensionMismatch if
  /// any entry has a nontrivial denominator.
  static FirSeq from_tf(const TfMatrix& f);

  int tau() const { return static_cast<int>(m_.size()); }
  int rows() const { return m_.empty() ? 0 : static_cast<int>(m_[0].rows()); }
  int cols() const { return m_.empty() ? 0 : static_cast<int>(m_[0].cols()); }

  Matrix& operator[](int k) { return m_[static_cast<size_t>(k)]; }
  const Matrix& operator[](int k) const { return m_[static_cast<size_t>(k)]; }

  TfMatrix to_tf() const;

 private:
  std::vector<Matrix> m_;
};

ComplexMatrix freq_response(const FirSeq& f, double omega);

// ============================================================================
// Filtering
// ============================================================================

Signal filter(const RationalTf& f, const Signal& x);
Signal filter(const TfMatrix& f, const Signal& x);
Signal filter(const FirSeq& f, const Signal& x);

// ============================================================================
// Feedback interconnection
// ============================================================================

/// The four closed-loop response operators of the loop y = G u + v, u = K y + r:
///   W = (I - GK)^-1      (v -> y)
///   X = (I - GK)^-1 G    (r -> y)
///   Y = (I - KG)^-1 K    (v -> u)
///   Z = (I - KG)^-1      (r -> u)
/// The scalar overload (and the matrix one for 1x1 systems) writes all four
/// maps over the shared loop polynomial D = den_G den_K - num_G num_K, so a
/// removable copy of den_G or den_K never enters a pole list, while every true
/// loop mode, including an unstable G-K cancellation, stays in D.
struct ClosedLoopMaps {
  TfMatrix W, X, Y, Z;
};

ClosedLoopMaps closed_loop_maps(const TfMatrix& G, const TfMatrix& K);
ClosedLoopMaps closed_loop_maps(const RationalTf& G, const RationalTf& K);

/// All four closed-loop maps stable. The shared denominator is never reduced
/// against the numerators, so hidden unstable cancellations between G and K
/// are counted. Matrix loops bigger than 1x1 are checked entrywise on the
/// unreduced products and can reject a stable loop whose representation
/// carries near-cancelling factors; the scalar form is exact.
bool internal_stability(const TfMatrix& G, const TfMatrix& K);
bool internal_stability(const RationalTf& G, const RationalTf& K);

// ============================================================================
// State space
// ============================================================================

struct StateSpace {
  Matrix A, B, C, D;
  int order() const { return static_cast<int>(A.rows()); }
};

/// Controllable canonical realization of a proper scalar transfer function.
StateSpace controllable_canonical(const RationalTf& f);

/// (A,B,C,D) -> (TAT^-1, TB, CT^-1, D).
StateSpace similarity_transform(const StateSpace& ss, const Matrix& T);

/// C (zI - A)^-1 B + D at z = e^{j omega}.
ComplexMatrix freq_response(const StateSpace& ss, double omega);

// ============================================================================
// Polynomial matrices
// ============================================================================

/// Inverse of a square polynomial matrix P(z^-1) = sum_k P[k] z^-k via
/// adjugate / determinant, entries returned as rational functions with the
/// determinant as common denominator. Requires P[0] invertible
/// (SingularConstantTerm otherwise). Meant for small sizes (n <= 4).
TfMatrix polymatrix_inverse(const FirSeq& P);

}  // namespace clid
