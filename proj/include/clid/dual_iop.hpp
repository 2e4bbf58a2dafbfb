#pragma once

#include <stdexcept>

#include "clid/eclsq.hpp"
#include "clid/lti.hpp"
#include "clid/signal.hpp"

namespace clid {

struct UnsupportedMimoRationalController : std::runtime_error {
  UnsupportedMimoRationalController()
      : std::runtime_error(
            "constraint assembly for a controller with non-trivial denominators is only "
            "implemented for the scalar case; MIMO controllers must be FIR") {}
};
struct NonInvertibleW0 : std::runtime_error {
  NonInvertibleW0()
      : std::runtime_error("leading coefficient of the estimated sensitivity is singular; the "
                           "plant estimate W^{-1} X does not exist") {}
};

/// Decision variables of the dual input-output parameterization: the four
/// closed-loop maps of (G, K) under u = K y + r,
///   W = (I - G K)^{-1}        (p x p)   r-to-... sensitivity at the output
///   X = (I - G K)^{-1} G      (p x m)   the r -> y map
///   Y = (I - K G)^{-1} K      (m x p)
///   Z = (I - K G)^{-1}        (m x m)
/// each as a FIR sequence of tau coefficient blocks, stacked in the order
/// W, X, Y, Z.
VarLayout iop_layout(int tau, int p, int m);

/// Affine feasibility set of the parameterization for a known controller:
///   Y - K W = 0,  Z - K X = I,  W - X K = I,  Y - Z K = 0,
/// imposed coefficient-wise on the full support of each product (length
/// nu + tau - 1 for a controller of FIR length nu), with shorter sequences
/// zero-padded. For a scalar controller n_K / d_K the equalities are cleared
/// of denominators, e.g. d_K Y - n_K W = 0, which keeps every row a finite
/// convolution; nu is then max(len n_K, len d_K). Rows are labelled
/// "<eq>[k](i,j)". Throws UnsupportedMimoRationalController for a non-FIR
/// controller with more than one input or output, and std::invalid_argument
/// when tau < nu (the maps of a loop with a length-nu controller cannot be
/// shorter than the controller itself).
ConstraintSet build_constraints(const TfMatrix& K, int tau);

struct DualIopSolution {
  FirSeq W, X, Y, Z;
  TfMatrix g_hat;           // W^{-1} X
  LsSolution diagnostics;
};

/// Closed-loop identification from one record of the exogenous excitation r
/// and the measured output y: minimize sum_k |y(k) - (X * r)(k)|^2 over the
/// constraint set above, then recover the plant as G = W^{-1} X. Throws
/// NonInvertibleW0 when the estimated W[0] is singular (tolerance 1e-10 on
/// |det|), TooShort when the record is shorter than tau.
DualIopSolution identify(const Signal& y, const Signal& r, const TfMatrix& K, int tau);

/// Consistency checks on a returned solution, evaluated on a 64-point
/// frequency grid omega_i = i*pi/65:
///   tyr_dev       max entrywise deviation of (I - G_hat K)^{-1} G_hat from X
///   recovery_dev  max entrywise deviation of W^{-1} X from X Z^{-1}
///   internally_stable  the certificate for the pair (G_hat, K)
struct ConsistencyReport {
  double tyr_dev = 0.0;
  double recovery_dev = 0.0;
  bool internally_stable = false;
};
ConsistencyReport verify_consistency(const DualIopSolution& sol, const TfMatrix& K);

}  // namespace clid
