#pragma once

#include "clid/eclsq.hpp"
#include "clid/lti.hpp"
#include "clid/signal.hpp"

namespace clid {

/// Decision variables of the dual system-level parameterization for a
/// controller realization (A, B, C, D) with n states, p measured channels
/// (controller inputs) and m actuation channels (controller outputs):
///   R  n x n   closed-loop response r -> controller state   (strictly proper)
///   N  n x m   response of the state to the excitation      (strictly proper)
///   M  p x n   output-side state response                   (strictly proper)
///   L  p x m   the r -> y map
/// Strictly proper sequences store coefficients 1..tau-1 (block index k-1);
/// L stores 0..tau-1. Stacking order R, N, M, L.
VarLayout slp_layout(int tau, int n, int p, int m);

/// Achievability constraints of the parameterization, imposed
/// coefficient-wise with indices outside each sequence's stored range
/// structurally zero:
///   R[k+1] = A R[k] + B M[k] + I(k=0)      R[k+1] = R[k] A + N[k] C + I(k=0)
///   N[k+1] = A N[k] + B L[k]               M[k+1] = M[k] A + L[k] C
/// The two R rows run for k = 0..tau-2 (each needs a next coefficient to
/// receive the recursion); the N and M rows run for k = 0..tau-1, so their
/// k = tau-1 rows become the terminal conditions A N[tau-1] + B L[tau-1] = 0
/// and M[tau-1] A + L[tau-1] C = 0 that close the truncation. The left-hand
/// pair makes the variables realizable against the controller dynamics, the
/// right-hand pair against its output map; a direct feedthrough D plays no
/// role. Requires tau >= 2 and n >= 1.
ConstraintSet build_slp_constraints(const StateSpace& K, int tau);

struct DualSlpSolution {
  FirSeq R, N, M, L;  // length tau; index 0 of R, N, M is the structural zero block
  TfMatrix g_hat;
  LsSolution diagnostics;
};

/// Closed-loop identification: minimize sum_k |y(k) - (L * r)(k)|^2 subject
/// to the constraints above, then recover the plant as
///   G = L - Mz P^{-1} Nz,
/// P the polynomial matrix with blocks R[1..] (constant term R[1] = I),
/// Mz the advance-by-one of M, Nz the sequence N (delay preserved). For a
/// scalar loop the identical system is evaluated in the loop-wrap form
/// G = L (1 + K L)^{-1} over the minimal denominator, which keeps the spurious
/// near-unit-circle factors of det(P) out of the representation; for wider
/// shapes the structured form is used after closing the sequences under the
/// recursions for n extra steps (exact closure for nilpotent controller
/// dynamics, i.e. any FIR controller). The recovered plant is invariant under
/// similarity transforms of (A, B, C).
DualSlpSolution identify_slp(const Signal& y, const Signal& r, const StateSpace& K, int tau);

}  // namespace clid
