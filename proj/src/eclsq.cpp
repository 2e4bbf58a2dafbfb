#include "clid/eclsq.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <utility>

namespace clid {

// ---------------------------------------------------------------------------
// variable layout

void VarLayout::add(const std::string& name, int tau, int rows, int cols) {
  if (tau < 1 || rows < 1 || cols < 1) throw std::invalid_argument("VarLayout::add: bad shape");
  for (const auto& p : params_)
    if (p.name == name) throw std::invalid_argument("VarLayout::add: duplicate parameter " + name);
  params_.push_back({name, total_, tau, rows, cols});
  total_ += tau * rows * cols;
}

const VarLayout::Param& VarLayout::param(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return p;
  throw std::invalid_argument("VarLayout: unknown parameter " + name);
}

int VarLayout::col(const std::string& name, int k, int i, int j) const {
  const Param& p = param(name);
  if (k < 0 || k >= p.tau || i < 0 || i >= p.rows || j < 0 || j >= p.cols)
    throw std::out_of_range("VarLayout::col: index outside parameter " + name);
  return p.offset + k * p.rows * p.cols + i * p.cols + j;
}

// ---------------------------------------------------------------------------
// constraint assembly

void ConstraintBuilder::begin_row(std::string label, double rhs) {
  if (open_) throw std::logic_error("ConstraintBuilder: begin_row while a row is open");
  current_ = Vector::Zero(layout_->total());
  current_label_ = std::move(label);
  current_rhs_ = rhs;
  open_ = true;
}

void ConstraintBuilder::add(const std::string& param, int k, int i, int j, double coef) {
  if (!open_) throw std::logic_error("ConstraintBuilder: add outside a row");
  const VarLayout::Param& p = layout_->param(param);
  if (k < 0 || k >= p.tau) return;  // beyond the stored horizon: structurally zero
  if (coef == 0.0) return;
  current_(layout_->col(param, k, i, j)) += coef;
}

void ConstraintBuilder::end_row() {
  if (!open_) throw std::logic_error("ConstraintBuilder: end_row without begin_row");
  rows_.push_back(std::move(current_));
  rhs_.push_back(current_rhs_);
  labels_.push_back(std::move(current_label_));
  open_ = false;
}

ConstraintSet ConstraintBuilder::take() {
  if (open_) throw std::logic_error("ConstraintBuilder: take with an open row");
  ConstraintSet cs;
  const int m = static_cast<int>(rows_.size());
  cs.A = Matrix::Zero(m, layout_->total());
  cs.b = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    cs.A.row(i) = rows_[i].transpose();
    cs.b(i) = rhs_[i];
  }
  cs.labels = std::move(labels_);
  rows_.clear();
  rhs_.clear();
  labels_.clear();
  return cs;
}

// ---------------------------------------------------------------------------
// solver

namespace {

// minimum-norm least-squares via truncated SVD; rank reported through *rank
Vector svd_solve(const Matrix& M, const Vector& rhs, double rank_tol, int* rank) {
  Eigen::BDCSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() ? rank_tol * sv(0) : 0.0;
  int r = 0;
  while (r < sv.size() && sv(r) > cut && sv(r) > 0.0) ++r;
  if (rank) *rank = r;
  Vector w = Vector::Zero(M.cols());
  if (r > 0) {
    Vector proj = svd.matrixU().leftCols(r).transpose() * rhs;
    proj.array() /= sv.head(r).array();
    w = svd.matrixV().leftCols(r) * proj;
  }
  return w;
}

}  // namespace

LsSolution solve(const LsProblem& p, const SolveOptions& opts) {
  const int n = static_cast<int>(p.T.cols());
  if (p.T.rows() != p.t.size()) throw DimensionMismatch("solve: T and t row counts differ");
  const int mc = p.constraints.rows();
  if (mc > 0 && p.constraints.A.cols() != n)
    throw DimensionMismatch("solve: constraint and cost column counts differ");

  LsSolution sol;

  if (mc == 0) {
    sol.nullspace_dim = n;
    sol.x = svd_solve(p.T, p.t, opts.rank_tol, &sol.rank_reduced);
    sol.degenerate_cost = sol.rank_reduced < n;
    sol.cost = (p.T * sol.x - p.t).squaredNorm();
    return sol;
  }

  // particular solution + nullspace basis of the constraints
  Eigen::JacobiSVD<Matrix> svd(p.constraints.A, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() ? opts.rank_tol * sv(0) : 0.0;
  int r = 0;
  while (r < sv.size() && sv(r) > cut && sv(r) > 0.0) ++r;
  sol.rank_constraints = r;
  sol.nullspace_dim = n - r;

  Vector xp = Vector::Zero(n);
  if (r > 0) {
    Vector proj = svd.matrixU().leftCols(r).transpose() * p.constraints.b;
    proj.array() /= sv.head(r).array();
    xp = svd.matrixV().leftCols(r) * proj;
  }
  const double feas = mc ? (p.constraints.A * xp - p.constraints.b).cwiseAbs().maxCoeff() : 0.0;
  if (feas > opts.feas_tol) throw InfeasibleConstraints();

  if (sol.nullspace_dim == 0) {
    sol.x = xp;
  } else {
    Matrix Z = svd.matrixV().rightCols(sol.nullspace_dim);
    Vector w = svd_solve(p.T * Z, p.t - p.T * xp, opts.rank_tol, &sol.rank_reduced);
    sol.degenerate_cost = sol.rank_reduced < sol.nullspace_dim;
    sol.x = xp + Z * w;
  }
  sol.cost = (p.T * sol.x - p.t).squaredNorm();
  sol.constraint_residual = (p.constraints.A * sol.x - p.constraints.b).cwiseAbs().maxCoeff();
  return sol;
}

// ---------------------------------------------------------------------------
// structured regression matrices

Matrix convolution_matrix(const FirSeq& K, int tau, ConvSide side) {
  if (tau < 1) throw std::invalid_argument("convolution_matrix: tau must be positive");
  const int nu = K.tau();
  const int q = side == ConvSide::left ? K.rows() : K.cols();
  const int s = side == ConvSide::left ? K.cols() : K.rows();
  Matrix M = Matrix::Zero(static_cast<Eigen::Index>(q) * (nu + tau - 1),
                          static_cast<Eigen::Index>(s) * tau);
  for (int j = 0; j < tau; ++j)
    for (int d = 0; d < nu; ++d) {
      if (side == ConvSide::left)
        M.block(static_cast<Eigen::Index>(j + d) * q, static_cast<Eigen::Index>(j) * s, q, s) =
            K[d];
      else
        M.block(static_cast<Eigen::Index>(j + d) * q, static_cast<Eigen::Index>(j) * s, q, s) =
            K[d].transpose();
    }
  return M;
}

Matrix block_toeplitz(const Signal& r, int tau) {
  if (tau < 1) throw std::invalid_argument("block_toeplitz: tau must be positive");
  const int N = r.length();
  const int m = r.dim();
  if (N < tau) throw TooShort();
  Matrix T = Matrix::Zero(N, static_cast<Eigen::Index>(m) * tau);
  for (int k = 0; k < N; ++k)
    for (int i = 0; i <= std::min(k, tau - 1); ++i)
      for (int c = 0; c < m; ++c) T(k, static_cast<Eigen::Index>(i) * m + c) = r(k - i, c);
  return T;
}

}  // namespace clid
