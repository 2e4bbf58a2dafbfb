#include "clid/dual_iop.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <string>

namespace clid {

VarLayout iop_layout(int tau, int p, int m) {
  VarLayout layout;
  layout.add("W", tau, p, p);
  layout.add("X", tau, p, m);
  layout.add("Y", tau, m, p);
  layout.add("Z", tau, m, m);
  return layout;
}

namespace {

std::string row_label(const char* eq, int k, int i, int j) {
  return std::string(eq) + "[" + std::to_string(k) + "](" + std::to_string(i) + "," +
         std::to_string(j) + ")";
}

// K given by FIR blocks: equalities convolve against the coefficient blocks.
ConstraintSet fir_constraints(const FirSeq& Kf, int tau) {
  const int m = Kf.rows(), p = Kf.cols();
  const int nu = Kf.tau();
  const int S = nu + tau - 1;
  VarLayout layout = iop_layout(tau, p, m);
  ConstraintBuilder cb(layout);

  for (int k = 0; k < S; ++k) {
    // Y - K W = 0   (m x p)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < p; ++b) {
        cb.begin_row(row_label("Y-KW", k, a, b), 0.0);
        cb.add("Y", k, a, b, 1.0);
        for (int j = std::max(0, k - nu + 1); j <= std::min(k, tau - 1); ++j)
          for (int c = 0; c < p; ++c) cb.add("W", j, c, b, -Kf[k - j](a, c));
        cb.end_row();
      }
    // Z - K X = I   (m x m)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        cb.begin_row(row_label("Z-KX", k, a, b), (k == 0 && a == b) ? 1.0 : 0.0);
        cb.add("Z", k, a, b, 1.0);
        for (int j = std::max(0, k - nu + 1); j <= std::min(k, tau - 1); ++j)
          for (int c = 0; c < p; ++c) cb.add("X", j, c, b, -Kf[k - j](a, c));
        cb.end_row();
      }
    // W - X K = I   (p x p)
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        cb.begin_row(row_label("W-XK", k, a, b), (k == 0 && a == b) ? 1.0 : 0.0);
        cb.add("W", k, a, b, 1.0);
        for (int j = std::max(0, k - nu + 1); j <= std::min(k, tau - 1); ++j)
          for (int c = 0; c < m; ++c) cb.add("X", j, a, c, -Kf[k - j](c, b));
        cb.end_row();
      }
    // Y - Z K = 0   (m x p)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < p; ++b) {
        cb.begin_row(row_label("Y-ZK", k, a, b), 0.0);
        cb.add("Y", k, a, b, 1.0);
        for (int j = std::max(0, k - nu + 1); j <= std::min(k, tau - 1); ++j)
          for (int c = 0; c < m; ++c) cb.add("Z", j, a, c, -Kf[k - j](c, b));
        cb.end_row();
      }
  }
  return cb.take();
}

// scalar rational controller n/d: clear denominators, e.g. d Y - n W = 0.
ConstraintSet scalar_rational_constraints(const RationalTf& K, int tau) {
  const Polynomial n = K.num().trimmed();
  const Polynomial d = K.den().trimmed();
  const int nu = std::max(n.size(), d.size());
  if (tau < nu) throw std::invalid_argument("build_constraints: tau shorter than the controller");
  const int S = nu + tau - 1;
  VarLayout layout = iop_layout(tau, 1, 1);
  ConstraintBuilder cb(layout);

  auto conv = [&](ConstraintBuilder& b, const char* param, const Polynomial& poly, int k,
                  double sign) {
    for (int j = std::max(0, k - poly.size() + 1); j <= std::min(k, tau - 1); ++j)
      b.add(param, j, 0, 0, sign * poly[k - j]);
  };
  auto rhs_d = [&](int k) { return k < d.size() ? d[k] : 0.0; };

  for (int k = 0; k < S; ++k) {
    cb.begin_row(row_label("dY-nW", k, 0, 0), 0.0);
    conv(cb, "Y", d, k, 1.0);
    conv(cb, "W", n, k, -1.0);
    cb.end_row();

    cb.begin_row(row_label("dZ-nX", k, 0, 0), rhs_d(k));
    conv(cb, "Z", d, k, 1.0);
    conv(cb, "X", n, k, -1.0);
    cb.end_row();

    cb.begin_row(row_label("dW-nX", k, 0, 0), rhs_d(k));
    conv(cb, "W", d, k, 1.0);
    conv(cb, "X", n, k, -1.0);
    cb.end_row();

    cb.begin_row(row_label("dY-nZ", k, 0, 0), 0.0);
    conv(cb, "Y", d, k, 1.0);
    conv(cb, "Z", n, k, -1.0);
    cb.end_row();
  }
  return cb.take();
}

FirSeq extract(const Vector& x, const VarLayout& layout, const std::string& name) {
  const VarLayout::Param& p = layout.param(name);
  FirSeq seq(p.tau, p.rows, p.cols);
  for (int k = 0; k < p.tau; ++k)
    for (int i = 0; i < p.rows; ++i)
      for (int j = 0; j < p.cols; ++j) seq[k](i, j) = x(layout.col(name, k, i, j));
  return seq;
}

}  // namespace

ConstraintSet build_constraints(const TfMatrix& K, int tau) {
  if (tau < 1) throw std::invalid_argument("build_constraints: tau must be positive");
  bool fir = true;
  for (int i = 0; i < K.rows(); ++i)
    for (int j = 0; j < K.cols(); ++j)
      if (!K(i, j).is_fir()) fir = false;
  if (fir) {
    FirSeq Kf = FirSeq::from_tf(K);
    if (tau < Kf.tau())
      throw std::invalid_argument("build_constraints: tau shorter than the controller");
    return fir_constraints(Kf, tau);
  }
  if (K.rows() == 1 && K.cols() == 1) return scalar_rational_constraints(K.scalar(), tau);
  throw UnsupportedMimoRationalController();
}

DualIopSolution identify(const Signal& y, const Signal& r, const TfMatrix& K, int tau) {
  const int p = K.cols();  // K maps y (p channels) to u (m channels)
  const int m = K.rows();
  if (y.dim() != p) throw DimensionMismatch("identify: output channel count does not match K");
  if (r.dim() != m) throw DimensionMismatch("identify: excitation channel count does not match K");
  if (y.length() != r.length()) throw DimensionMismatch("identify: record lengths differ");

  VarLayout layout = iop_layout(tau, p, m);
  LsProblem prob;
  prob.constraints = build_constraints(K, tau);

  const int N = r.length();
  const Matrix toep = block_toeplitz(r, tau);  // N x (m tau)
  prob.T = Matrix::Zero(static_cast<Eigen::Index>(N) * p, layout.total());
  prob.t = Vector::Zero(static_cast<Eigen::Index>(N) * p);
  const int offX = layout.param("X").offset;
  for (int k = 0; k < N; ++k)
    for (int a = 0; a < p; ++a) {
      const Eigen::Index row = static_cast<Eigen::Index>(k) * p + a;
      prob.t(row) = y(k, a);
      for (int i = 0; i < tau; ++i)
        for (int c = 0; c < m; ++c)
          prob.T(row, offX + i * p * m + a * m + c) = toep(k, static_cast<Eigen::Index>(i) * m + c);
    }

  DualIopSolution sol;
  sol.diagnostics = solve(prob);
  sol.W = extract(sol.diagnostics.x, layout, "W");
  sol.X = extract(sol.diagnostics.x, layout, "X");
  sol.Y = extract(sol.diagnostics.x, layout, "Y");
  sol.Z = extract(sol.diagnostics.x, layout, "Z");

  if (std::abs(sol.W[0].determinant()) < 1e-10) throw NonInvertibleW0();
  if (p == 1 && m == 1) {
    std::vector<double> num(static_cast<size_t>(tau)), den(static_cast<size_t>(tau));
    for (int k = 0; k < tau; ++k) {
      num[static_cast<size_t>(k)] = sol.X[k](0, 0);
      den[static_cast<size_t>(k)] = sol.W[k](0, 0);
    }
    sol.g_hat =
        TfMatrix::from_scalar(RationalTf(Polynomial(std::move(num)), Polynomial(std::move(den))));
  } else {
    sol.g_hat = polymatrix_inverse(sol.W) * sol.X.to_tf();
  }
  return sol;
}

ConsistencyReport verify_consistency(const DualIopSolution& sol, const TfMatrix& K) {
  ConsistencyReport rep;
  const int p = K.cols();
  for (int i = 1; i <= 64; ++i) {
    const double w = i * std::numbers::pi / 65.0;
    const ComplexMatrix Gw = freq_response(sol.g_hat, w);
    const ComplexMatrix Kw = freq_response(K, w);
    const ComplexMatrix Ww = freq_response(sol.W, w);
    const ComplexMatrix Xw = freq_response(sol.X, w);
    const ComplexMatrix Zw = freq_response(sol.Z, w);
    const ComplexMatrix tyr =
        (ComplexMatrix::Identity(p, p) - Gw * Kw).partialPivLu().solve(Gw);
    rep.tyr_dev = std::max(rep.tyr_dev, (tyr - Xw).cwiseAbs().maxCoeff());
    const ComplexMatrix left = Ww.partialPivLu().solve(Xw);
    const ComplexMatrix right = Zw.transpose().partialPivLu().solve(Xw.transpose()).transpose();
    rep.recovery_dev = std::max(rep.recovery_dev, (left - right).cwiseAbs().maxCoeff());
  }
  rep.internally_stable = internal_stability(sol.g_hat, K);
  return rep;
}

}  // namespace clid
