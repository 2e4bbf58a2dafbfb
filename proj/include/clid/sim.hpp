#pragma once

#include "clid/lti.hpp"
#include "clid/signal.hpp"

namespace clid {

/// Feedback loop  y = G u + v,  u = feedback_sign * K y + r,  v = H e.
/// feedback_sign -1 is the conventional negative-feedback wiring; +1 matches
/// the parameterizations in this library, which absorb the sign into K.
struct ClosedLoopPlant {
  TfMatrix G, K, H;
  int feedback_sign = -1;
};

ClosedLoopPlant make_siso_plant(const RationalTf& g, const RationalTf& k, const RationalTf& h,
                                int feedback_sign = -1);

/// The controller as seen by the identification routines: feedback_sign * K.
TfMatrix effective_controller(const ClosedLoopPlant& plant);

struct SimResult {
  Signal u, y;
};

/// Zero initial conditions everywhere; the per-step algebraic loop through the
/// direct feedthrough of G and K is solved exactly at each sample.
SimResult simulate(const ClosedLoopPlant& plant, const Signal& r, const Signal& e);

}  // namespace clid
