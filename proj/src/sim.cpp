#include "clid/sim.hpp"

#include <Eigen/LU>

namespace clid {

ClosedLoopPlant make_siso_plant(const RationalTf& g, const RationalTf& k, const RationalTf& h,
                                int feedback_sign) {
  ClosedLoopPlant plant;
  plant.G = TfMatrix::from_scalar(g);
  plant.K = TfMatrix::from_scalar(k);
  plant.H = TfMatrix::from_scalar(h);
  plant.feedback_sign = feedback_sign;
  return plant;
}

TfMatrix effective_controller(const ClosedLoopPlant& plant) {
  return RationalTf::constant(static_cast<double>(plant.feedback_sign)) * plant.K;
}

namespace {

// Running difference-equation state for one rational entry: the entry's own
// output history; the shared input history lives with the caller.
struct EntryState {
  const Polynomial* num;
  const Polynomial* den;
  Vector w;  // this entry's output, filled as simulation advances
};

// Past-only part of the entry output at step k (everything except num[0]*input(k)).
double past_part(const EntryState& s, const Vector& input, int k) {
  double acc = 0.0;
  for (int t = 1; t < s.num->size() && t <= k; ++t) acc += (*s.num)[t] * input(k - t);
  for (int t = 1; t < s.den->size() && t <= k; ++t) acc -= (*s.den)[t] * s.w(k - t);
  return acc;
}

}  // namespace

SimResult simulate(const ClosedLoopPlant& plant, const Signal& r, const Signal& e) {
  const int p = plant.G.rows(), m = plant.G.cols();
  if (plant.K.rows() != m || plant.K.cols() != p)
    throw DimensionMismatch("simulate: K must be m x p for G p x m");
  if (plant.H.rows() != p) throw DimensionMismatch("simulate: H row count must match G");
  if (r.dim() != m) throw DimensionMismatch("simulate: r channel count");
  if (e.dim() != plant.H.cols()) throw DimensionMismatch("simulate: e channel count");
  if (r.length() != e.length()) throw DimensionMismatch("simulate: r and e lengths differ");
  if (plant.feedback_sign != 1 && plant.feedback_sign != -1)
    throw std::invalid_argument("feedback_sign must be +1 or -1");

  const double sign = static_cast<double>(plant.feedback_sign);
  const int n = r.length();

  // Algebraic loop through the constant terms:
  //   y = DG u + (past G) + v,   u = sign (DK y + past K) + r
  // so (I - sign DG DK) y = DG (sign past_K + r) + past_G + v each step.
  const Matrix DG = plant.G.const_coeff();
  const Matrix DK = plant.K.const_coeff();
  const Matrix loop = Matrix::Identity(p, p) - sign * DG * DK;
  if (std::abs(loop.determinant()) < 1e-12) throw IllPosedLoop{};
  const Eigen::PartialPivLU<Matrix> loop_lu(loop);

  const Signal v = filter(plant.H, e);

  SimResult res{Signal::zeros(n, m), Signal::zeros(n, p)};

  std::vector<EntryState> gs(static_cast<size_t>(p * m));
  std::vector<EntryState> ks(static_cast<size_t>(m * p));
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < m; ++j)
      gs[static_cast<size_t>(i * m + j)] = {&plant.G(i, j).num(), &plant.G(i, j).den(),
                                            Vector::Zero(n)};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j)
      ks[static_cast<size_t>(i * p + j)] = {&plant.K(i, j).num(), &plant.K(i, j).den(),
                                            Vector::Zero(n)};

  for (int k = 0; k < n; ++k) {
    Vector past_g = Vector::Zero(p), past_k = Vector::Zero(m);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j)
        past_g(i) += past_part(gs[static_cast<size_t>(i * m + j)], res.u.data().col(j), k);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j)
        past_k(i) += past_part(ks[static_cast<size_t>(i * p + j)], res.y.data().col(j), k);

    const Vector rhs = DG * (sign * past_k + r.sample(k)) + past_g + v.sample(k);
    const Vector yk = loop_lu.solve(rhs);
    const Vector uk = sign * (DK * yk + past_k) + r.sample(k);

    res.y.data().row(k) = yk.transpose();
    res.u.data().row(k) = uk.transpose();
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < m; ++j) {
        EntryState& s = gs[static_cast<size_t>(i * m + j)];
        s.w(k) = past_part(s, res.u.data().col(j), k) + (*s.num)[0] * uk(j);
      }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j) {
        EntryState& s = ks[static_cast<size_t>(i * p + j)];
        s.w(k) = past_part(s, res.y.data().col(j), k) + (*s.num)[0] * yk(j);
      }
  }
  return res;
}

}  // namespace clid
