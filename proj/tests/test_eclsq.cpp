#include <random>

#include "clid/eclsq.hpp"
#include "clid/signal.hpp"
#include "doctest.h"

using namespace clid;

namespace {

// Independent reference: solve min |Tx - t|^2 s.t. Ax = b through the dense
// KKT system  [T'T  A'; A  0] [x; lambda] = [T't; b].
Vector kkt_solve(const Matrix& T, const Vector& t, const Matrix& A, const Vector& b) {
  const int n = static_cast<int>(T.cols());
  const int k = static_cast<int>(A.rows());
  Matrix kkt = Matrix::Zero(n + k, n + k);
  kkt.topLeftCorner(n, n) = T.transpose() * T;
  kkt.topRightCorner(n, k) = A.transpose();
  kkt.bottomLeftCorner(k, n) = A;
  Vector rhs(n + k);
  rhs.head(n) = T.transpose() * t;
  rhs.tail(k) = b;
  return kkt.fullPivLu().solve(rhs).head(n);
}

FirSeq random_fir(std::mt19937_64& rng, int tau, int rows, int cols) {
  std::normal_distribution<double> dist;
  FirSeq f(tau, rows, cols);
  for (int k = 0; k < tau; ++k)
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) f[k](i, j) = dist(rng);
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// variable layout and row builder

TEST_CASE("layout assigns contiguous block-major offsets") {
  VarLayout layout;
  layout.add("X", 3, 2, 2);
  layout.add("Y", 2, 1, 1);
  CHECK(layout.total() == 14);
  CHECK(layout.param("X").offset == 0);
  CHECK(layout.param("Y").offset == 12);
  CHECK(layout.col("X", 0, 0, 0) == 0);
  CHECK(layout.col("X", 1, 0, 1) == 5);  // block 1, entry (0,1) of a 2x2 block
  CHECK(layout.col("X", 2, 1, 1) == 11);
  CHECK(layout.col("Y", 1, 0, 0) == 13);
  CHECK(layout.params().size() == 2);
}

TEST_CASE("builder drops coefficient indices outside the stored range") {
  VarLayout layout;
  layout.add("X", 2, 1, 1);
  ConstraintBuilder cb(layout);
  cb.begin_row("only-x1", 1.5);
  cb.add("X", 1, 0, 0, 2.0);
  cb.add("X", 7, 0, 0, 5.0);   // beyond tau: structurally zero
  cb.add("X", -1, 0, 0, 5.0);  // before the support
  cb.end_row();
  const ConstraintSet cs = cb.take();
  REQUIRE(cs.rows() == 1);
  CHECK(cs.labels[0] == "only-x1");
  CHECK(cs.b(0) == 1.5);
  CHECK(cs.A(0, 0) == 0.0);
  CHECK(cs.A(0, 1) == 2.0);
}

// ---------------------------------------------------------------------------
// solver against the dense reference

TEST_CASE("constrained solutions match the dense saddle-point reference") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> dist;
  std::uniform_int_distribution<int> nvars(3, 10);

  for (int inst = 0; inst < 200; ++inst) {
    const int n = nvars(rng);
    const int rows = n + 2 + inst % 17;
    std::uniform_int_distribution<int> nc(1, n - 1);
    const int k = nc(rng);

    Matrix T(rows, n), A(k, n);
    Vector t(rows), xf(n);
    for (int i = 0; i < rows; ++i) {
      t(i) = dist(rng);
      for (int j = 0; j < n; ++j) T(i, j) = dist(rng);
    }
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = dist(rng);
    for (int j = 0; j < n; ++j) xf(j) = dist(rng);
    const Vector b = A * xf;  // feasible by construction

    VarLayout layout;
    layout.add("x", n, 1, 1);
    ConstraintBuilder cb(layout);
    for (int i = 0; i < k; ++i) {
      cb.begin_row("c", b(i));
      for (int j = 0; j < n; ++j) cb.add("x", j, 0, 0, A(i, j));
      cb.end_row();
    }
    const LsProblem problem{T, t, cb.take()};
    const LsSolution sol = solve(problem);
    const Vector ref = kkt_solve(T, t, A, b);

    CHECK((sol.x - ref).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((A * sol.x - b).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(sol.constraint_residual < 1e-8);
    CHECK(sol.cost == doctest::Approx((T * sol.x - t).squaredNorm()).epsilon(1e-9));
    CHECK(sol.rank_constraints == k);
    CHECK(sol.nullspace_dim == n - k);
    CHECK_FALSE(sol.degenerate_cost);
  }
}

TEST_CASE("empty constraint set reduces to ordinary least squares") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> dist;
  Matrix T(12, 4);
  Vector t(12);
  for (int i = 0; i < 12; ++i) {
    t(i) = dist(rng);
    for (int j = 0; j < 4; ++j) T(i, j) = dist(rng);
  }
  VarLayout layout;
  layout.add("x", 4, 1, 1);
  ConstraintBuilder cb(layout);
  const LsSolution sol = solve({T, t, cb.take()});
  const Vector ref = (T.transpose() * T).ldlt().solve(T.transpose() * t);
  CHECK((sol.x - ref).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sol.rank_constraints == 0);
  CHECK(sol.nullspace_dim == 4);
}

TEST_CASE("exactly fittable data gives zero cost") {
  Matrix T(6, 2);
  T << 1, 0, 0, 1, 1, 1, 2, 1, 1, 2, 3, 1;
  Vector xstar(2);
  xstar << 0.5, -1.25;
  const Vector t = T * xstar;
  VarLayout layout;
  layout.add("x", 2, 1, 1);
  ConstraintBuilder cb(layout);
  const LsSolution sol = solve({T, t, cb.take()});
  CHECK((sol.x - xstar).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sol.cost < 1e-20);
}

TEST_CASE("inconsistent rows are rejected, redundant consistent rows are kept") {
  Matrix T = Matrix::Identity(3, 3);
  Vector t = Vector::Zero(3);
  VarLayout layout;
  layout.add("x", 3, 1, 1);

  auto one_row = [&](ConstraintBuilder& cb, double rhs) {
    cb.begin_row("pin-x0", rhs);
    cb.add("x", 0, 0, 0, 1.0);
    cb.end_row();
  };

  ConstraintBuilder incons(layout);
  one_row(incons, 1.0);
  one_row(incons, 2.0);
  CHECK_THROWS_AS(solve({T, t, incons.take()}), InfeasibleConstraints);

  ConstraintBuilder redund(layout);
  one_row(redund, 1.0);
  one_row(redund, 1.0);
  const LsSolution sol = solve({T, t, redund.take()});
  CHECK(sol.rank_constraints == 1);
  CHECK(sol.nullspace_dim == 2);
  CHECK(sol.x(0) == doctest::Approx(1.0));
  CHECK(sol.x(1) == doctest::Approx(0.0));
}

TEST_CASE("rank-deficient reduced cost is flagged and solved minimum-norm") {
  const Matrix T = Matrix::Zero(3, 3);
  const Vector t = Vector::Zero(3);
  VarLayout layout;
  layout.add("x", 3, 1, 1);
  ConstraintBuilder cb(layout);
  cb.begin_row("pin-x0", 1.0);
  cb.add("x", 0, 0, 0, 1.0);
  cb.end_row();
  const LsSolution sol = solve({T, t, cb.take()});
  CHECK(sol.degenerate_cost);
  CHECK(sol.x(0) == doctest::Approx(1.0));
  CHECK(std::abs(sol.x(1)) < 1e-12);
  CHECK(std::abs(sol.x(2)) < 1e-12);
}

// ---------------------------------------------------------------------------
// structured matrices

TEST_CASE("scalar convolution matrix matches the frozen stencil") {
  const FirSeq k = FirSeq::from_scalar({0.0, -1.0, 0.8});
  const Matrix left = convolution_matrix(k, 3, ConvSide::left);
  REQUIRE(left.rows() == 5);  // support of a (3,3) convolution
  REQUIRE(left.cols() == 3);
  const double want[5][3] = {{0, 0, 0}, {-1, 0, 0}, {0.8, -1, 0}, {0, 0.8, -1}, {0, 0, 0.8}};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) CHECK(left(i, j) == doctest::Approx(want[i][j]));

  // scalars commute, so both sides coincide
  const Matrix right = convolution_matrix(k, 3, ConvSide::right);
  CHECK((left - right).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("block convolution matrices implement both product orders") {
  std::mt19937_64 rng(77);
  const int tau = 3, nu = 2;
  const FirSeq K = random_fir(rng, nu, 2, 2);
  const FirSeq P = random_fir(rng, tau, 2, 2);
  const int support = nu + tau - 1;

  FirSeq kp(support, 2, 2), pk(support, 2, 2);
  for (int s = 0; s < support; ++s)
    for (int j = 0; j < tau; ++j)
      if (s - j >= 0 && s - j < nu) {
        kp[s] += K[s - j] * P[j];
        pk[s] += P[j] * K[s - j];
      }

  // the left matrix maps one stacked column of P to that column of K * P
  const Matrix ml = convolution_matrix(K, tau, ConvSide::left);
  REQUIRE(ml.rows() == 2 * support);
  REQUIRE(ml.cols() == 2 * tau);
  for (int c = 0; c < 2; ++c) {
    Vector pcol(2 * tau), want(2 * support);
    for (int k = 0; k < tau; ++k) pcol.segment(2 * k, 2) = P[k].col(c);
    for (int k = 0; k < support; ++k) want.segment(2 * k, 2) = kp[k].col(c);
    CHECK((ml * pcol - want).cwiseAbs().maxCoeff() < 1e-12);
  }

  // the right matrix maps one stacked row of P to that row of P * K
  const Matrix mr = convolution_matrix(K, tau, ConvSide::right);
  REQUIRE(mr.rows() == 2 * support);
  REQUIRE(mr.cols() == 2 * tau);
  for (int i = 0; i < 2; ++i) {
    Vector prow(2 * tau), want(2 * support);
    for (int k = 0; k < tau; ++k) prow.segment(2 * k, 2) = P[k].row(i).transpose();
    for (int k = 0; k < support; ++k) want.segment(2 * k, 2) = pk[k].row(i).transpose();
    CHECK((mr * prow - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("regression matrix stacks lagged samples") {
  const Signal r = Signal::from_samples({1.0, 2.0, 3.0});
  const Matrix m = block_toeplitz(r, 2);
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  const double want[3][2] = {{1, 0}, {2, 1}, {3, 2}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) CHECK(m(i, j) == doctest::Approx(want[i][j]));

  Signal r2 = Signal::zeros(3, 2);
  r2.data() << 1, 4, 2, 5, 3, 6;
  const Matrix m2 = block_toeplitz(r2, 2);
  REQUIRE(m2.rows() == 3);
  REQUIRE(m2.cols() == 4);
  const double want2[3][4] = {{1, 4, 0, 0}, {2, 5, 1, 4}, {3, 6, 2, 5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) CHECK(m2(i, j) == doctest::Approx(want2[i][j]));

  CHECK_THROWS_AS(block_toeplitz(Signal::zeros(1), 2), TooShort);
}
