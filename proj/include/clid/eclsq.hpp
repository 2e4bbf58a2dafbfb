#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "clid/lti.hpp"
#include "clid/signal.hpp"

namespace clid {

struct TooShort : std::runtime_error {
  TooShort() : std::runtime_error("signal shorter than the requested horizon") {}
};
struct InfeasibleConstraints : std::runtime_error {
  InfeasibleConstraints()
      : std::runtime_error("equality constraints are inconsistent (no feasible point)") {}
};

/// Column layout for stacked FIR decision variables. Parameter P of shape
/// rows x cols with tau coefficient blocks occupies columns
/// [offset, offset + tau*rows*cols), scalar (k,i,j) at offset + k*rows*cols + i*cols + j.
class VarLayout {
 public:
  struct Param {
    std::string name;
    int offset, tau, rows, cols;
  };

  void add(const std::string& name, int tau, int rows, int cols);
  const Param& param(const std::string& name) const;
  int col(const std::string& name, int k, int i, int j) const;
  int total() const { return total_; }
  const std::vector<Param>& params() const { return params_; }

 private:
  std::vector<Param> params_;
  int total_ = 0;
};

/// Rows of A x = b with a human-readable label per row.
struct ConstraintSet {
  Matrix A;
  Vector b;
  std::vector<std::string> labels;
  int rows() const { return static_cast<int>(A.rows()); }
};

/// Row-by-row assembler. References to coefficient indices k outside a
/// parameter's stored range are dropped: a parameter shorter than the
/// equality's support is implicitly padded with zero blocks, which is exactly
/// how finite-horizon operator equalities acquire their trailing rows.
class ConstraintBuilder {
 public:
  explicit ConstraintBuilder(const VarLayout& layout) : layout_(&layout) {}

  void begin_row(std::string label, double rhs);
  void add(const std::string& param, int k, int i, int j, double coef);
  void end_row();

  ConstraintSet take();

 private:
  const VarLayout* layout_;
  std::vector<Vector> rows_;
  std::vector<double> rhs_;
  std::vector<std::string> labels_;
  Vector current_;
  std::string current_label_;
  double current_rhs_ = 0.0;
  bool open_ = false;
};

/// minimize ||T x - t||^2  subject to  A x = b.
struct LsProblem {
  Matrix T;
  Vector t;
  ConstraintSet constraints;  // zero rows = unconstrained
};

struct SolveOptions {
  double rank_tol = 1e-10;  // singular values below rank_tol * sigma_max count as zero
  double feas_tol = 1e-8;   // max-abs residual allowed for A x = b
};

struct LsSolution {
  Vector x;
  double cost = 0.0;                 // ||T x - t||^2 at the solution
  double constraint_residual = 0.0;  // max |A x - b|
  int rank_constraints = 0;
  int nullspace_dim = 0;
  int rank_reduced = 0;        // rank of T restricted to the feasible subspace
  bool degenerate_cost = false;  // reduced problem rank-deficient; minimum-norm step taken
};

/// Nullspace elimination: SVD of A gives a particular solution and an
/// orthonormal nullspace basis; the cost is minimized over the basis
/// coefficients. The cost Hessian is typically singular on the full variable
/// space (only some parameters are penalized), which rules out a plain KKT
/// solve. Throws InfeasibleConstraints when A x = b has no solution within
/// feas_tol.
LsSolution solve(const LsProblem& p, const SolveOptions& opts = {});

enum class ConvSide { left, right };

/// Banded block lower-triangular matrix of the convolution with K (nu blocks,
/// each q x s). side = left maps the stacked coefficients of P (tau blocks)
/// to the stacked coefficients of K * P: block (i, j) holds K[i - j],
/// i = 0..nu+tau-2, j = 0..tau-1. side = right returns the same structure
/// built from K^T, which maps stacked transposed coefficients of P to those
/// of P * K; for scalar K both coincide.
Matrix convolution_matrix(const FirSeq& K, int tau, ConvSide side);

/// N x (dim * tau) regression matrix: row k holds r(k)^T, r(k-1)^T, ...,
/// r(k-tau+1)^T with zeros before time zero. Throws TooShort when the signal
/// has fewer than tau samples.
Matrix block_toeplitz(const Signal& r, int tau);

}  // namespace clid
