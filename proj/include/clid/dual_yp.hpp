#pragma once

#include <stdexcept>

#include "clid/eclsq.hpp"
#include "clid/lti.hpp"
#include "clid/signal.hpp"

namespace clid {

struct UnstableInput : std::runtime_error {
  UnstableInput()
      : std::runtime_error("trivial coprime factorization (F, I) requires a stable system") {}
};

/// Right factorization F = N D^{-1} with both factors stable.
struct CoprimePair {
  TfMatrix N, D;
};

/// (F, I) — valid exactly when F itself is stable. Throws UnstableInput
/// otherwise.
CoprimePair trivial_factorization(const TfMatrix& f);

/// Filtered regression pair for the dual Youla parameter:
///   beta = Dx y - Nx u,  alpha = Dk r,
/// where (Nx, Dx) factors the auxiliary plant Gx and (Nk, Dk) factors the
/// controller. In the loop y = G u + v, u = K y + r these satisfy
/// beta = Q alpha + noise with Q the dual Youla parameter of G against Gx.
struct VirtualData {
  Signal beta, alpha;
};
VirtualData virtual_data(const Signal& y, const Signal& u, const Signal& r, const CoprimePair& kf,
                         const CoprimePair& gxf);

struct DualYpSolution {
  FirSeq Q;
  TfMatrix g_hat;
  LsSolution diagnostics;
};

/// Ordinary least squares for a FIR dual Youla parameter (tau coefficients)
/// on the virtual data, then plant recovery
///   G = (Dx + Q Nk)^{-1} (Nx + Q Dk).
/// Every plant in the range of the parameterization is stabilized by K by
/// construction, whatever Q the noise produces. Throws NonCausalInverse when
/// the constant term of Dx + Q Nk is singular.
DualYpSolution identify_yp(const Signal& y, const Signal& u, const Signal& r,
                           const CoprimePair& kf, const CoprimePair& gxf, int tau);

/// Two-experiment variant for an auxiliary plant built from data: stage one
/// fits a parameter on the auxiliary record with Gx = 0, stage two re-runs
/// the fit on the main record around the stage-one plant estimate, using the
/// factorization (Q1 Dk, I + Q1 Nk) it induces.
DualYpSolution two_stage_gb(const Signal& y_aux, const Signal& u_aux, const Signal& r_aux,
                            const Signal& y, const Signal& u, const Signal& r,
                            const CoprimePair& kf, int tau);

}  // namespace clid
