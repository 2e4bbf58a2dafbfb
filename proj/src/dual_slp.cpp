#include "clid/dual_slp.hpp"

#include <string>
#include <vector>

namespace clid {

VarLayout slp_layout(int tau, int n, int p, int m) {
  if (tau < 2) throw std::invalid_argument("slp_layout: tau must be at least 2");
  if (n < 1) throw std::invalid_argument("slp_layout: controller must have at least one state");
  VarLayout layout;
  layout.add("R", tau - 1, n, n);
  layout.add("N", tau - 1, n, m);
  layout.add("M", tau - 1, p, n);
  layout.add("L", tau, p, m);
  return layout;
}

namespace {

std::string row_label(const char* eq, int k, int i, int j) {
  return std::string(eq) + "[" + std::to_string(k) + "](" + std::to_string(i) + "," +
         std::to_string(j) + ")";
}

// C (zI - A)^{-1} B + D for a single-input single-output realization via the
// Faddeev-LeVerrier recursion, written in the delay variable so the constant
// denominator coefficient is 1 whatever the spectrum of A. Built from traces
// and the Krylov-like products C A_k B, so it is invariant under similarity
// transforms of (A, B, C) up to rounding.
RationalTf ss_tf_scalar(const StateSpace& ss) {
  const int n = ss.order();
  std::vector<double> num(static_cast<size_t>(n) + 1, 0.0);
  std::vector<double> den(static_cast<size_t>(n) + 1, 0.0);
  den[0] = 1.0;
  Matrix ak = Matrix::Identity(n, n);
  for (int k = 0; k < n; ++k) {
    num[static_cast<size_t>(k) + 1] = (ss.C * ak * ss.B)(0, 0);
    const Matrix m = ss.A * ak;
    den[static_cast<size_t>(k) + 1] = -m.trace() / (k + 1);
    ak = m + den[static_cast<size_t>(k) + 1] * Matrix::Identity(n, n);
  }
  const double feedthrough = ss.D.size() > 0 ? ss.D(0, 0) : 0.0;
  for (size_t k = 0; k < num.size(); ++k) num[k] += feedthrough * den[k];
  return RationalTf(Polynomial(num), Polynomial(den));
}

}  // namespace

ConstraintSet build_slp_constraints(const StateSpace& K, int tau) {
  const int n = K.order();
  const int p = static_cast<int>(K.B.cols());
  const int m = static_cast<int>(K.C.rows());
  VarLayout layout = slp_layout(tau, n, p, m);
  ConstraintBuilder cb(layout);

  // Strictly proper sequences store coefficient k at index k-1; out-of-range
  // indices (coefficient 0 on the trailing terms) are dropped by the builder,
  // which is exactly the padding the equalities need. The R rows stop at
  // k = tau-2: their k = tau-1 rows would pin the tails of R and M to the
  // controller dynamics and, through the recursions, zero out two more
  // coefficients of L than the truncation itself requires, collapsing the
  // parameterization onto the input-output one. The N and M rows keep their
  // terminal step, which closes the truncation (it zeroes L[tau-2], L[tau-1]
  // for the benchmark-style controllers).
  for (int k = 0; k < tau; ++k) {
    if (k + 1 < tau) {
      // R[k+1] - A R[k] - B M[k] = I(k=0)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          cb.begin_row(row_label("zR-AR-BM", k, a, b), (k == 0 && a == b) ? 1.0 : 0.0);
          cb.add("R", k, a, b, 1.0);
          for (int c = 0; c < n; ++c) cb.add("R", k - 1, c, b, -K.A(a, c));
          for (int c = 0; c < p; ++c) cb.add("M", k - 1, c, b, -K.B(a, c));
          cb.end_row();
        }
      // R[k+1] - R[k] A - N[k] C = I(k=0)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          cb.begin_row(row_label("zR-RA-NC", k, a, b), (k == 0 && a == b) ? 1.0 : 0.0);
          cb.add("R", k, a, b, 1.0);
          for (int c = 0; c < n; ++c) cb.add("R", k - 1, a, c, -K.A(c, b));
          for (int c = 0; c < m; ++c) cb.add("N", k - 1, a, c, -K.C(c, b));
          cb.end_row();
        }
    }
    // N[k+1] - A N[k] - B L[k] = 0
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < m; ++b) {
        cb.begin_row(row_label("zN-AN-BL", k, a, b), 0.0);
        cb.add("N", k, a, b, 1.0);
        for (int c = 0; c < n; ++c) cb.add("N", k - 1, c, b, -K.A(a, c));
        for (int c = 0; c < p; ++c) cb.add("L", k, c, b, -K.B(a, c));
        cb.end_row();
      }
    // M[k+1] - M[k] A - L[k] C = 0
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < n; ++b) {
        cb.begin_row(row_label("zM-MA-LC", k, a, b), 0.0);
        cb.add("M", k, a, b, 1.0);
        for (int c = 0; c < n; ++c) cb.add("M", k - 1, a, c, -K.A(c, b));
        for (int c = 0; c < m; ++c) cb.add("L", k, a, c, -K.C(c, b));
        cb.end_row();
      }
  }
  return cb.take();
}

DualSlpSolution identify_slp(const Signal& y, const Signal& r, const StateSpace& K, int tau) {
  const int n = K.order();
  const int p = static_cast<int>(K.B.cols());
  const int m = static_cast<int>(K.C.rows());
  if (y.dim() != p) throw DimensionMismatch("identify_slp: output channels do not match K inputs");
  if (r.dim() != m)
    throw DimensionMismatch("identify_slp: excitation channels do not match K outputs");
  if (y.length() != r.length()) throw DimensionMismatch("identify_slp: record lengths differ");

  VarLayout layout = slp_layout(tau, n, p, m);
  LsProblem prob;
  prob.constraints = build_slp_constraints(K, tau);

  const int N = r.length();
  const Matrix toep = block_toeplitz(r, tau);
  prob.T = Matrix::Zero(static_cast<Eigen::Index>(N) * p, layout.total());
  prob.t = Vector::Zero(static_cast<Eigen::Index>(N) * p);
  const int offL = layout.param("L").offset;
  for (int k = 0; k < N; ++k)
    for (int a = 0; a < p; ++a) {
      const Eigen::Index row = static_cast<Eigen::Index>(k) * p + a;
      prob.t(row) = y(k, a);
      for (int i = 0; i < tau; ++i)
        for (int c = 0; c < m; ++c)
          prob.T(row, offL + i * p * m + a * m + c) = toep(k, static_cast<Eigen::Index>(i) * m + c);
    }

  DualSlpSolution sol;
  sol.diagnostics = solve(prob);

  auto pull = [&](const std::string& name, int rows, int cols, bool shifted) {
    FirSeq seq(tau, rows, cols);
    const int first = shifted ? 1 : 0;
    for (int k = first; k < tau; ++k)
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          seq[k](i, j) = sol.diagnostics.x(layout.col(name, k - first, i, j));
    return seq;
  };
  sol.R = pull("R", n, n, true);
  sol.N = pull("N", n, m, true);
  sol.M = pull("M", p, n, true);
  sol.L = pull("L", p, m, false);

  // Recover the plant from the quadruple. On a feasible solution the
  // structured form G = L - Mz P^{-1} Nz (P[j] = R[j+1], Mz[j] = M[j+1],
  // Nz = N) and the loop-wrap form G = L (I + K L)^{-1} describe the same
  // system; for a scalar loop the latter is evaluated because it yields the
  // minimal denominator 1 + K(w) L(w) directly, whereas the structured form
  // piles copies of det(P) into the representation whose roots ride near the
  // unit circle and flip the stability certificate through rounding alone.
  if (p == 1 && m == 1) {
    const RationalTf ktf = ss_tf_scalar(K);
    const RationalTf ltf = sol.L.to_tf().scalar();
    sol.g_hat = TfMatrix::from_scalar(ltf * tf_inv(RationalTf::constant(1.0) + ktf * ltf));
    return sol;
  }

  // General shapes keep the structured form. Before inverting, close the
  // truncation by running the recursions n more steps (L past its support is
  // zero). Evaluating the identity on the raw truncated sequences leaves an
  // O(tail) artifact in G; after the closure steps the tails of a controller
  // with nilpotent dynamics (any FIR controller) vanish exactly and the
  // artifact is gone, while a general controller has it damped by A^n.
  const int ext = tau + n;
  FirSeq Re(ext, n, n), Ne(ext, n, m), Me(ext, p, n);
  for (int k = 0; k < tau; ++k) {
    Re[k] = sol.R[k];
    Ne[k] = sol.N[k];
    Me[k] = sol.M[k];
  }
  for (int k = tau; k < ext; ++k) {
    const Matrix Lprev = k - 1 < tau ? sol.L[k - 1] : Matrix::Zero(p, m).eval();
    Re[k] = K.A * Re[k - 1] + K.B * Me[k - 1];
    Ne[k] = K.A * Ne[k - 1] + K.B * Lprev;
    Me[k] = Me[k - 1] * K.A + Lprev * K.C;
  }
  FirSeq P(ext - 1, n, n), Mz(ext - 1, p, n);
  for (int j = 0; j + 1 < ext; ++j) {
    P[j] = Re[j + 1];
    Mz[j] = Me[j + 1];
  }
  sol.g_hat = sol.L.to_tf() - Mz.to_tf() * polymatrix_inverse(P) * Ne.to_tf();
  return sol;
}

}  // namespace clid
