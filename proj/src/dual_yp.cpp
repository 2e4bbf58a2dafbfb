#include "clid/dual_yp.hpp"

namespace clid {

CoprimePair trivial_factorization(const TfMatrix& f) {
  if (!is_stable(f)) throw UnstableInput();
  return {f, TfMatrix::identity(f.cols())};
}

VirtualData virtual_data(const Signal& y, const Signal& u, const Signal& r, const CoprimePair& kf,
                         const CoprimePair& gxf) {
  if (y.length() != u.length() || y.length() != r.length())
    throw DimensionMismatch("virtual_data: record lengths differ");
  VirtualData vd;
  vd.beta = filter(gxf.D, y) - filter(gxf.N, u);
  vd.alpha = filter(kf.D, r);
  return vd;
}

DualYpSolution identify_yp(const Signal& y, const Signal& u, const Signal& r,
                           const CoprimePair& kf, const CoprimePair& gxf, int tau) {
  if (tau < 1) throw std::invalid_argument("identify_yp: tau must be positive");
  const VirtualData vd = virtual_data(y, u, r, kf, gxf);
  const int p = vd.beta.dim();
  const int m = vd.alpha.dim();
  const int N = vd.beta.length();

  VarLayout layout;
  layout.add("Q", tau, p, m);
  LsProblem prob;  // unconstrained: every FIR Q is admissible
  const Matrix toep = block_toeplitz(vd.alpha, tau);
  prob.T = Matrix::Zero(static_cast<Eigen::Index>(N) * p, layout.total());
  prob.t = Vector::Zero(static_cast<Eigen::Index>(N) * p);
  for (int k = 0; k < N; ++k)
    for (int a = 0; a < p; ++a) {
      const Eigen::Index row = static_cast<Eigen::Index>(k) * p + a;
      prob.t(row) = vd.beta(k, a);
      for (int i = 0; i < tau; ++i)
        for (int c = 0; c < m; ++c)
          prob.T(row, static_cast<Eigen::Index>(i) * p * m + a * m + c) =
              toep(k, static_cast<Eigen::Index>(i) * m + c);
    }

  DualYpSolution sol;
  sol.diagnostics = solve(prob);
  sol.Q = FirSeq(tau, p, m);
  for (int k = 0; k < tau; ++k)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j) sol.Q[k](i, j) = sol.diagnostics.x(layout.col("Q", k, i, j));

  const TfMatrix Qtf = sol.Q.to_tf();
  sol.g_hat = tf_inv(gxf.D + Qtf * kf.N) * (gxf.N + Qtf * kf.D);
  return sol;
}

DualYpSolution two_stage_gb(const Signal& y_aux, const Signal& u_aux, const Signal& r_aux,
                            const Signal& y, const Signal& u, const Signal& r,
                            const CoprimePair& kf, int tau) {
  const int m = kf.N.rows();
  const int p = kf.N.cols();
  CoprimePair gx0{TfMatrix::zero(p, m), TfMatrix::identity(p)};
  const DualYpSolution stage1 = identify_yp(y_aux, u_aux, r_aux, kf, gx0, tau);

  const TfMatrix Q1 = stage1.Q.to_tf();
  CoprimePair gx2{Q1 * kf.D, TfMatrix::identity(p) + Q1 * kf.N};
  return identify_yp(y, u, r, kf, gx2, tau);
}

}  // namespace clid
