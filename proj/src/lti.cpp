#include "clid/lti.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace clid {

namespace {

// Roots of a polynomial given by descending-power coefficients c[0] z^D + ... + c[D],
// via the companion matrix. Leading zeros are stripped first.
std::vector<Complex> poly_roots_desc(std::vector<double> c) {
  size_t lead = 0;
  while (lead + 1 < c.size() && c[lead] == 0.0) ++lead;
  c.erase(c.begin(), c.begin() + static_cast<long>(lead));
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg <= 0 || c[0] == 0.0) return {};
  Matrix comp = Matrix::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<size_t>(deg - i)] / c[0];
  Eigen::EigenSolver<Matrix> es(comp, /*computeEigenvectors=*/false);
  std::vector<Complex> out(static_cast<size_t>(deg));
  for (int i = 0; i < deg; ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return out;
}

// Multiply out prod (z - r_i); roots assumed conjugate-closed, imaginary dust dropped.
std::vector<double> poly_from_roots_desc(const std::vector<Complex>& roots, double gain) {
  std::vector<Complex> p{1.0};
  for (const Complex& r : roots) {
    std::vector<Complex> q(p.size() + 1, Complex(0.0));
    for (size_t i = 0; i < p.size(); ++i) {
      q[i] += p[i];
      q[i + 1] -= p[i] * r;
    }
    p = std::move(q);
  }
  std::vector<double> out(p.size());
  for (size_t i = 0; i < p.size(); ++i) out[i] = gain * p[i].real();
  return out;
}

}  // namespace

// ============================================================================
// Polynomial
// ============================================================================

Polynomial::Polynomial(std::initializer_list<double> c) : c_(c) {
  if (c_.empty()) c_.push_back(0.0);
}

Polynomial::Polynomial(std::vector<double> c) : c_(std::move(c)) {
  if (c_.empty()) c_.push_back(0.0);
}

Polynomial Polynomial::delay(int k) {
  std::vector<double> c(static_cast<size_t>(k) + 1, 0.0);
  c.back() = 1.0;
  return Polynomial(std::move(c));
}

int Polynomial::degree() const {
  for (int k = size() - 1; k > 0; --k)
    if (c_[static_cast<size_t>(k)] != 0.0) return k;
  return 0;
}

double Polynomial::operator[](int k) const {
  if (k < 0 || k >= size()) return 0.0;
  return c_[static_cast<size_t>(k)];
}

Polynomial Polynomial::trimmed() const {
  std::vector<double> c(c_.begin(), c_.begin() + degree() + 1);
  return Polynomial(std::move(c));
}

bool Polynomial::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
}

Complex Polynomial::eval(Complex w) const {
  Complex acc(0.0);
  for (int k = size() - 1; k >= 0; --k) acc = acc * w + c_[static_cast<size_t>(k)];
  return acc;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(static_cast<size_t>(std::max(a.size(), b.size())), 0.0);
  for (int k = 0; k < static_cast<int>(c.size()); ++k) c[static_cast<size_t>(k)] = a[k] + b[k];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(static_cast<size_t>(std::max(a.size(), b.size())), 0.0);
  for (int k = 0; k < static_cast<int>(c.size()); ++k) c[static_cast<size_t>(k)] = a[k] - b[k];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(static_cast<size_t>(a.size() + b.size() - 1), 0.0);
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < b.size(); ++j) c[static_cast<size_t>(i + j)] += a[i] * b[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(double c, const Polynomial& a) {
  std::vector<double> v = a.coeffs();
  for (double& x : v) x *= c;
  return Polynomial(std::move(v));
}

// ============================================================================
// RationalTf
// ============================================================================

RationalTf::RationalTf(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
  const double d0 = den_[0];
  if (d0 == 0.0) throw std::invalid_argument("denominator constant term must be nonzero");
  if (d0 != 1.0) {
    num_ = (1.0 / d0) * num_;
    den_ = (1.0 / d0) * den_;
  }
}

bool RationalTf::is_fir() const { return den_.degree() == 0; }

RationalTf operator+(const RationalTf& a, const RationalTf& b) {
  return RationalTf(a.num() * b.den() + b.num() * a.den(), a.den() * b.den());
}

RationalTf operator-(const RationalTf& a, const RationalTf& b) {
  return RationalTf(a.num() * b.den() - b.num() * a.den(), a.den() * b.den());
}

RationalTf operator*(const RationalTf& a, const RationalTf& b) {
  return RationalTf(a.num() * b.num(), a.den() * b.den());
}

RationalTf operator*(double c, const RationalTf& a) { return RationalTf(c * a.num(), a.den()); }

RationalTf tf_inv(const RationalTf& f) {
  if (f.num()[0] == 0.0) throw NonCausalInverse{};
  return RationalTf(f.den(), f.num());
}

Complex freq_response(const RationalTf& f, double omega) {
  const Complex w = std::exp(Complex(0.0, -omega));  // z^-1
  const Complex d = f.den().eval(w);
  if (std::abs(d) < 1e-14) throw PoleOnGrid{};
  return f.num().eval(w) / d;
}

std::vector<Complex> poles(const RationalTf& f) {
  const Polynomial num = f.num().trimmed();
  const Polynomial den = f.den().trimmed();
  const int D = std::max(num.degree(), den.degree());
  std::vector<double> c(static_cast<size_t>(D) + 1, 0.0);
  for (int k = 0; k <= den.degree(); ++k) c[static_cast<size_t>(k)] = den[k];
  return poly_roots_desc(std::move(c));
}

std::vector<Complex> zeros(const RationalTf& f) {
  const Polynomial num = f.num().trimmed();
  const Polynomial den = f.den().trimmed();
  const int D = std::max(num.degree(), den.degree());
  std::vector<double> c(static_cast<size_t>(D) + 1, 0.0);
  for (int k = 0; k <= num.degree(); ++k) c[static_cast<size_t>(k)] = num[k];
  return poly_roots_desc(std::move(c));
}

bool is_stable(const RationalTf& f) {
  for (const Complex& p : poles(f))
    if (std::abs(p) >= 1.0 - kStabilityMargin) return false;
  return true;
}

RationalTf reduce(const RationalTf& f, double tol) {
  if (f.num().is_zero()) return RationalTf();
  std::vector<Complex> zs = zeros(f);
  std::vector<Complex> ps = poles(f);
  std::vector<bool> zdead(zs.size(), false), pdead(ps.size(), false);
  for (size_t i = 0; i < zs.size(); ++i) {
    for (size_t j = 0; j < ps.size(); ++j) {
      if (!pdead[j] && std::abs(zs[i] - ps[j]) <= tol) {
        zdead[i] = pdead[j] = true;
        break;
      }
    }
  }
  std::vector<Complex> zleft, pleft;
  for (size_t i = 0; i < zs.size(); ++i)
    if (!zdead[i]) zleft.push_back(zs[i]);
  for (size_t j = 0; j < ps.size(); ++j)
    if (!pdead[j]) pleft.push_back(ps[j]);

  // First nonzero numerator coefficient is the gain of the z-domain factorization.
  const Polynomial num = f.num().trimmed();
  int k0 = 0;
  while (num[k0] == 0.0) ++k0;
  const int cancelled = static_cast<int>(zs.size() - zleft.size());
  const int D = std::max(num.degree(), f.den().trimmed().degree()) - cancelled;

  std::vector<double> dz = poly_from_roots_desc(pleft, 1.0);          // degree D, monic
  std::vector<double> nz = poly_from_roots_desc(zleft, num[k0]);      // degree D - k0
  // Back to ascending powers of z^-1: pad the numerator with k0 leading zeros.
  std::vector<double> nw(static_cast<size_t>(D) + 1, 0.0);
  for (size_t i = 0; i < nz.size(); ++i) nw[static_cast<size_t>(k0) + i] = nz[i];
  return RationalTf(Polynomial(std::move(nw)), Polynomial(std::move(dz)));
}

std::string to_text(const RationalTf& f) {
  char buf[64];
  std::string out = "num:";
  for (double c : f.num().coeffs()) {
    std::snprintf(buf, sizeof buf, " %.17g", c);
    out += buf;
  }
  out += "\nden:";
  for (double c : f.den().coeffs()) {
    std::snprintf(buf, sizeof buf, " %.17g", c);
    out += buf;
  }
  out += "\n";
  return out;
}

RationalTf rational_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Polynomial num, den = Polynomial::one();
  bool saw_num = false, saw_den = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    std::vector<double> c;
    double v;
    while (ls >> v) c.push_back(v);
    if (tag == "num:") {
      num = Polynomial(std::move(c));
      saw_num = true;
    } else if (tag == "den:") {
      den = Polynomial(std::move(c));
      saw_den = true;
    }
  }
  if (!saw_num || !saw_den) throw std::invalid_argument("expected 'num:' and 'den:' lines");
  return RationalTf(std::move(num), std::move(den));
}

// ============================================================================
// TfMatrix
// ============================================================================

TfMatrix::TfMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * static_cast<size_t>(cols)) {
  if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix dimension");
}

TfMatrix TfMatrix::identity(int n) {
  TfMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = RationalTf::constant(1.0);
  return m;
}

TfMatrix TfMatrix::from_scalar(const RationalTf& f) {
  TfMatrix m(1, 1);
  m(0, 0) = f;
  return m;
}

const RationalTf& TfMatrix::scalar() const {
  if (rows_ != 1 || cols_ != 1) throw DimensionMismatch("scalar() on a non-1x1 matrix");
  return e_[0];
}

Matrix TfMatrix::const_coeff() const {
  Matrix m(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j).num()[0];
  return m;
}

TfMatrix operator+(const TfMatrix& a, const TfMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix add");
  TfMatrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

TfMatrix operator-(const TfMatrix& a, const TfMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("matrix sub");
  TfMatrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

TfMatrix operator*(const TfMatrix& a, const TfMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix mul");
  TfMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      RationalTf acc;
      for (int k = 0; k < a.cols(); ++k) acc = acc + a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

TfMatrix operator*(const RationalTf& c, const TfMatrix& a) {
  TfMatrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = c * a(i, j);
  return out;
}

namespace {

TfMatrix tf_minor(const TfMatrix& f, int row, int col) {
  TfMatrix m(f.rows() - 1, f.cols() - 1);
  for (int i = 0, mi = 0; i < f.rows(); ++i) {
    if (i == row) continue;
    for (int j = 0, mj = 0; j < f.cols(); ++j) {
      if (j == col) continue;
      m(mi, mj) = f(i, j);
      ++mj;
    }
    ++mi;
  }
  return m;
}

RationalTf tf_det(const TfMatrix& f) {
  if (f.rows() == 1) return f(0, 0);
  RationalTf acc;
  for (int j = 0; j < f.cols(); ++j) {
    RationalTf term = f(0, j) * tf_det(tf_minor(f, 0, j));
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

TfMatrix tf_inv(const TfMatrix& f) {
  if (f.rows() != f.cols()) throw DimensionMismatch("inverse of a non-square matrix");
  const int n = f.rows();
  if (n == 1) {
    TfMatrix out(1, 1);
    out(0, 0) = tf_inv(f(0, 0));
    return out;
  }
  const RationalTf det = tf_det(f);
  if (std::abs(det.num()[0]) < 1e-12) throw NonCausalInverse{};
  const RationalTf det_inv = tf_inv(det);
  TfMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      RationalTf cof = tf_det(tf_minor(f, j, i));  // adjugate: transposed cofactors
      if ((i + j) % 2 != 0) cof = -1.0 * cof;
      out(i, j) = cof * det_inv;
    }
  }
  return out;
}

ComplexMatrix freq_response(const TfMatrix& f, double omega) {
  ComplexMatrix m(f.rows(), f.cols());
  for (int i = 0; i < f.rows(); ++i)
    for (int j = 0; j < f.cols(); ++j) m(i, j) = freq_response(f(i, j), omega);
  return m;
}

bool is_stable(const TfMatrix& f) {
  for (int i = 0; i < f.rows(); ++i)
    for (int j = 0; j < f.cols(); ++j)
      if (!is_stable(f(i, j))) return false;
  return true;
}

// ============================================================================
// FirSeq
// ============================================================================

FirSeq::FirSeq(int tau, int rows, int cols) {
  if (tau < 0) throw DimensionMismatch("negative FIR length");
  m_.assign(static_cast<size_t>(tau), Matrix::Zero(rows, cols));
}

FirSeq::FirSeq(std::vector<Matrix> blocks) : m_(std::move(blocks)) {
  for (const Matrix& b : m_)
    if (b.rows() != m_[0].rows() || b.cols() != m_[0].cols())
      throw DimensionMismatch("FIR blocks must share one shape");
}

FirSeq FirSeq::from_scalar(const std::vector<double>& coeffs) {
  FirSeq f(static_cast<int>(coeffs.size()), 1, 1);
  for (size_t k = 0; k < coeffs.size(); ++k) f.m_[k](0, 0) = coeffs[k];
  return f;
}

FirSeq FirSeq::from_tf(const TfMatrix& f) {
  int tau = 1;
  for (int i = 0; i < f.rows(); ++i) {
    for (int j = 0; j < f.cols(); ++j) {
      if (!f(i, j).is_fir())
        throw DimensionMismatch("entry has a nontrivial denominator; not an FIR matrix");
      tau = std::max(tau, f(i, j).num().degree() + 1);
    }
  }
  FirSeq out(tau, f.rows(), f.cols());
  for (int k = 0; k < tau; ++k)
    for (int i = 0; i < f.rows(); ++i)
      for (int j = 0; j < f.cols(); ++j) out[k](i, j) = f(i, j).num()[k];
  return out;
}

TfMatrix FirSeq::to_tf() const {
  TfMatrix out(rows(), cols());
  for (int i = 0; i < rows(); ++i) {
    for (int j = 0; j < cols(); ++j) {
      std::vector<double> c(static_cast<size_t>(tau()), 0.0);
      for (int k = 0; k < tau(); ++k) c[static_cast<size_t>(k)] = m_[static_cast<size_t>(k)](i, j);
      out(i, j) = RationalTf::fir(std::move(c));
    }
  }
  return out;
}

ComplexMatrix freq_response(const FirSeq& f, double omega) {
  ComplexMatrix acc = ComplexMatrix::Zero(f.rows(), f.cols());
  const Complex w = std::exp(Complex(0.0, -omega));
  Complex wk(1.0);
  for (int k = 0; k < f.tau(); ++k) {
    acc += wk * f[k].cast<Complex>();
    wk *= w;
  }
  return acc;
}

// ============================================================================
// Filtering
// ============================================================================

namespace {

// Direct-form difference equation with zero initial conditions.
void filter_siso_accumulate(const Polynomial& num, const Polynomial& den,
                            const Eigen::VectorXd& x, Eigen::VectorXd& out) {
  const int n = static_cast<int>(x.size());
  const int ln = num.size(), ld = den.size();
  Vector y(n);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int i = 0; i < ln && i <= k; ++i) acc += num[i] * x(k - i);
    for (int i = 1; i < ld && i <= k; ++i) acc -= den[i] * y(k - i);
    y(k) = acc;
  }
  out += y;
}

}  // namespace

Signal filter(const RationalTf& f, const Signal& x) {
  return filter(TfMatrix::from_scalar(f), x);
}

Signal filter(const TfMatrix& f, const Signal& x) {
  if (x.dim() != f.cols()) throw DimensionMismatch("filter: input channel count");
  Signal out = Signal::zeros(x.length(), f.rows());
  for (int i = 0; i < f.rows(); ++i) {
    Vector acc = Vector::Zero(x.length());
    for (int j = 0; j < f.cols(); ++j)
      filter_siso_accumulate(f(i, j).num(), f(i, j).den(), x.data().col(j), acc);
    out.data().col(i) = acc;
  }
  return out;
}

Signal filter(const FirSeq& f, const Signal& x) {
  if (x.dim() != f.cols()) throw DimensionMismatch("filter: input channel count");
  Signal out = Signal::zeros(x.length(), f.rows());
  for (int k = 0; k < x.length(); ++k) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.rows());
    for (int t = 0; t < f.tau() && t <= k; ++t) acc += f[t] * x.sample(k - t);
    out.data().row(k) = acc.transpose();
  }
  return out;
}

// ============================================================================
// Feedback interconnection
// ============================================================================

ClosedLoopMaps closed_loop_maps(const TfMatrix& G, const TfMatrix& K) {
  if (K.rows() != G.cols() || K.cols() != G.rows())
    throw DimensionMismatch("closed_loop_maps: K must be m x p for G p x m");
  const int p = G.rows(), m = G.cols();
  if (p == 1 && m == 1) return closed_loop_maps(G.scalar(), K.scalar());
  const Matrix dir = Matrix::Identity(p, p) - G.const_coeff() * K.const_coeff();
  if (std::abs(dir.determinant()) < 1e-12) throw IllPosedLoop{};
  ClosedLoopMaps maps;
  maps.W = tf_inv(TfMatrix::identity(p) - G * K);
  maps.X = maps.W * G;
  maps.Z = tf_inv(TfMatrix::identity(m) - K * G);
  maps.Y = maps.Z * K;
  return maps;
}

ClosedLoopMaps closed_loop_maps(const RationalTf& G, const RationalTf& K) {
  // Common-denominator form: D = den_G den_K - num_G num_K carries every loop
  // mode; writing the maps over D directly keeps the removable den_G copy in
  // X = W G (and den_K in Y = Z K) out of the pole lists, which matters when a
  // recovered plant holds near-cancelling factors close to the unit circle.
  if (std::abs(1.0 - G.num()[0] * K.num()[0]) < 1e-12) throw IllPosedLoop{};
  const Polynomial dens = G.den() * K.den();
  const Polynomial d = dens - G.num() * K.num();
  ClosedLoopMaps maps;
  maps.W = TfMatrix::from_scalar(RationalTf(dens, d));
  maps.X = TfMatrix::from_scalar(RationalTf(G.num() * K.den(), d));
  maps.Y = TfMatrix::from_scalar(RationalTf(K.num() * G.den(), d));
  maps.Z = maps.W;
  return maps;
}

bool internal_stability(const TfMatrix& G, const TfMatrix& K) {
  const ClosedLoopMaps maps = closed_loop_maps(G, K);
  return is_stable(maps.W) && is_stable(maps.X) && is_stable(maps.Y) && is_stable(maps.Z);
}

bool internal_stability(const RationalTf& G, const RationalTf& K) {
  return internal_stability(TfMatrix::from_scalar(G), TfMatrix::from_scalar(K));
}

// ============================================================================
// State space
// ============================================================================

StateSpace controllable_canonical(const RationalTf& f) {
  const Polynomial num = f.num().trimmed();
  const Polynomial den = f.den().trimmed();
  const int n = std::max(num.degree(), den.degree());
  StateSpace ss;
  ss.A = Matrix::Zero(n, n);
  ss.B = Matrix::Zero(n, 1);
  ss.C = Matrix::Zero(1, n);
  ss.D = Matrix::Zero(1, 1);
  const double b0 = num[0];
  ss.D(0, 0) = b0;
  if (n == 0) return ss;
  for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) ss.A(n - 1, j) = -den[n - j];
  ss.B(n - 1, 0) = 1.0;
  for (int j = 0; j < n; ++j) ss.C(0, j) = num[n - j] - den[n - j] * b0;
  return ss;
}

StateSpace similarity_transform(const StateSpace& ss, const Matrix& T) {
  if (T.rows() != T.cols() || T.rows() != ss.A.rows())
    throw DimensionMismatch("similarity transform: T must be square of the state order");
  const Matrix Tinv = T.partialPivLu().solve(Matrix::Identity(T.rows(), T.cols()));
  StateSpace out;
  out.A = T * ss.A * Tinv;
  out.B = T * ss.B;
  out.C = ss.C * Tinv;
  out.D = ss.D;
  return out;
}

ComplexMatrix freq_response(const StateSpace& ss, double omega) {
  const Complex z = std::exp(Complex(0.0, omega));
  const int n = ss.order();
  if (n == 0) return ss.D.cast<Complex>();
  ComplexMatrix M = z * ComplexMatrix::Identity(n, n) - ss.A.cast<Complex>();
  ComplexMatrix sol = M.partialPivLu().solve(ss.B.cast<Complex>());
  return ss.C.cast<Complex>() * sol + ss.D.cast<Complex>();
}

// ============================================================================
// Polynomial matrices
// ============================================================================

namespace {

using PolyGrid = std::vector<std::vector<Polynomial>>;

PolyGrid grid_minor(const PolyGrid& g, int row, int col) {
  PolyGrid m;
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    if (i == row) continue;
    std::vector<Polynomial> r;
    for (int j = 0; j < static_cast<int>(g.size()); ++j) {
      if (j == col) continue;
      r.push_back(g[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    }
    m.push_back(std::move(r));
  }
  return m;
}

Polynomial grid_det(const PolyGrid& g) {
  if (g.size() == 1) return g[0][0];
  Polynomial acc;
  for (int j = 0; j < static_cast<int>(g.size()); ++j) {
    Polynomial term = g[0][static_cast<size_t>(j)] * grid_det(grid_minor(g, 0, j));
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace

TfMatrix polymatrix_inverse(const FirSeq& P) {
  const int n = P.rows();
  if (n != P.cols()) throw DimensionMismatch("polynomial matrix inverse: square only");
  if (n == 0) throw DimensionMismatch("polynomial matrix inverse: empty matrix");
  if (std::abs(P[0].determinant()) < 1e-12) throw SingularConstantTerm{};

  PolyGrid g(static_cast<size_t>(n), std::vector<Polynomial>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::vector<double> c(static_cast<size_t>(P.tau()), 0.0);
      for (int k = 0; k < P.tau(); ++k) c[static_cast<size_t>(k)] = P[k](i, j);
      g[static_cast<size_t>(i)][static_cast<size_t>(j)] = Polynomial(std::move(c));
    }
  }
  const Polynomial det = grid_det(g);
  TfMatrix out(n, n);
  if (n == 1) {
    out(0, 0) = RationalTf(Polynomial::one(), det);
    return out;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Polynomial cof = grid_det(grid_minor(g, j, i));
      if ((i + j) % 2 != 0) cof = -1.0 * cof;
      out(i, j) = RationalTf(std::move(cof), det);
    }
  }
  return out;
}

}  // namespace clid
