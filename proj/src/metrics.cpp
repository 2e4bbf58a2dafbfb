#include "clid/metrics.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

namespace clid {

FreqGrid freq_grid(int n_samples) {
  if (n_samples < 1 || n_samples % 2 == 0)
    throw std::invalid_argument("freq_grid: sample count must be odd and positive");
  return freq_grid_points((n_samples + 1) / 2);
}

FreqGrid freq_grid_points(int points) {
  if (points < 1) throw std::invalid_argument("freq_grid_points: need at least one point");
  FreqGrid g;
  g.omega.resize(static_cast<size_t>(points));
  for (int i = 1; i <= points; ++i)
    g.omega[static_cast<size_t>(i - 1)] = i * std::numbers::pi / (points + 1);
  return g;
}

namespace {

double spectral_norm(const ComplexMatrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return m.jacobiSvd().singularValues()(0);
}

}  // namespace

ErrReport err(const TfMatrix& g0, const TfMatrix& gh, const FreqGrid& grid) {
  if (g0.rows() != gh.rows() || g0.cols() != gh.cols())
    throw DimensionMismatch("err: transfer matrices differ in shape");
  ErrReport rep;
  double num_sum = 0.0, den_sum = 0.0;
  for (double w : grid.omega) {
    const ComplexMatrix a = freq_response(g0, w);
    const ComplexMatrix b = freq_response(gh, w);
    const double e = spectral_norm(a - b);
    const double g = spectral_norm(a);
    if (g <= 1e-14)
      throw std::invalid_argument("err: reference response vanishes on the grid");
    rep.err_sum += 100.0 * e / g;
    num_sum += e;
    den_sum += g;
  }
  rep.err_mean = rep.err_sum / grid.size();
  rep.err_ratio = 100.0 * num_sum / den_sum;
  return rep;
}

std::vector<BodeTable> bode_data(const TfMatrix& g, const FreqGrid& grid) {
  std::vector<BodeTable> tables(static_cast<size_t>(g.rows()) * g.cols());
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      BodeTable& t = tables[static_cast<size_t>(i) * g.cols() + j];
      t.omega = grid.omega;
      t.mag_db.reserve(t.omega.size());
      t.phase_deg.reserve(t.omega.size());
      double prev = 0.0;
      bool first = true;
      for (double w : grid.omega) {
        const Complex h = freq_response(g(i, j), w);
        t.mag_db.push_back(20.0 * std::log10(std::max(std::abs(h), 1e-300)));
        double ph = std::arg(h);
        if (!first)  // unwrap: keep successive phases within pi of each other
          ph += 2.0 * std::numbers::pi * std::round((prev - ph) / (2.0 * std::numbers::pi));
        prev = ph;
        first = false;
        t.phase_deg.push_back(ph * 180.0 / std::numbers::pi);
      }
    }
  return tables;
}

}  // namespace clid
