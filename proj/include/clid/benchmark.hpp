#pragma once

#include "clid/sim.hpp"

namespace clid {

/// Second-order oscillatory plant 1 / (1 - 1.6 z^-1 + 0.89 z^-2),
/// poles 0.8 +/- 0.5i (magnitude ~0.943).
inline RationalTf benchmark_g0() { return RationalTf({1.0}, {1.0, -1.6, 0.89}); }

/// Deadbeat controller z^-1 - 0.8 z^-2, applied with negative feedback;
/// the closed loop has both poles at 0.3.
inline RationalTf benchmark_k0() { return RationalTf({0.0, 1.0, -0.8}, {1.0}); }

/// ARMA noise shaping filter
///   (1 - 1.56 z^-1 + 1.045 z^-2 - 0.3338 z^-3)
///   / (1 - 2.35 z^-1 + 2.09 z^-2 - 0.6675 z^-3);
/// the denominator factors as (1 - 0.75 z^-1)(1 - 1.6 z^-1 + 0.89 z^-2), so
/// the noise shares the plant dynamics plus a low-pass pole at 0.75.
inline RationalTf benchmark_h0() {
  return RationalTf({1.0, -1.56, 1.045, -0.3338}, {1.0, -2.35, 2.09, -0.6675});
}

/// The full loop: y = G0 u + H0 e, u = -K0 y + r.
inline ClosedLoopPlant benchmark_plant() {
  return make_siso_plant(benchmark_g0(), benchmark_k0(), benchmark_h0(), -1);
}

/// Stable auxiliary plant -z^-1 / (1 + 0.5 z^-1) used as a fixed offset for
/// the dual Youla variants.
inline RationalTf aux_plant_c() { return RationalTf({0.0, -1.0}, {1.0, 0.5}); }

}  // namespace clid
