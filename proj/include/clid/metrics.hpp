#pragma once

#include <vector>

#include "clid/lti.hpp"

namespace clid {

/// Evaluation grid omega_i = i*pi/(L+1), i = 1..L, open at both ends so the
/// grid never touches z = 1 or z = -1.
struct FreqGrid {
  std::vector<double> omega;
  int size() const { return static_cast<int>(omega.size()); }
};

/// Grid matched to a record of N samples: L = (N+1)/2 points. N must be odd.
FreqGrid freq_grid(int n_samples);
/// Grid with an explicit point count.
FreqGrid freq_grid_points(int points);

/// Frequency-domain estimation error. With e_i = ||G0(w_i) - Gh(w_i)|| and
/// g_i = ||G0(w_i)|| (spectral norms):
///   err_sum   100 * sum_i e_i / g_i
///   err_mean  err_sum / L
///   err_ratio 100 * (sum_i e_i) / (sum_i g_i)
struct ErrReport {
  double err_sum = 0.0;
  double err_mean = 0.0;
  double err_ratio = 0.0;
};
ErrReport err(const TfMatrix& g0, const TfMatrix& gh, const FreqGrid& grid);

/// Magnitude (dB) and unwrapped phase (degrees) per grid point for one
/// transfer-function entry.
struct BodeTable {
  std::vector<double> omega, mag_db, phase_deg;
};
/// Tables for every entry of a transfer matrix, row-major.
std::vector<BodeTable> bode_data(const TfMatrix& g, const FreqGrid& grid);

}  // namespace clid
