#pragma once

#include <cstdint>
#include <stdexcept>

#include "clid/signal.hpp"

namespace clid {

struct BadOrder : std::runtime_error {
  BadOrder() : std::runtime_error("shift-register order must lie in [2, 16]") {}
};
struct ZeroSeed : std::runtime_error {
  ZeroSeed() : std::runtime_error("shift-register seed must be nonzero after masking") {}
};

/// Maximum-length pseudo-random binary sequence of order d: one full period of
/// 2^d - 1 samples taking values +-amplitude.
struct PrbsSpec {
  int order = 10;
  double amplitude = 1.0;
  /// Initial register state, masked to d bits; the default masks to all ones.
  std::uint32_t seed = 0xFFFFu;
};

Signal prbs(const PrbsSpec& spec);

/// Steps until the register revisits the all-ones state; 2^d - 1 for every
/// table entry (the feedback masks are chosen maximal and checked by test).
int lfsr_period(int order);

/// i.i.d. N(0, sigma^2) samples, n rows by dim channels. Deterministic in
/// (seed, n, dim, sigma): a 64-bit Mersenne Twister drives Box-Muller, uniforms
/// are taken as (x >> 11 + 0.5) * 2^-53, and values fill row-major.
Signal gaussian(int n, int dim, double sigma, std::uint64_t seed);

}  // namespace clid
