#pragma once

// Spreads, averaged commutators, Heisenberg drift and the Mandelstam-Tamm
// time deviation with its uncertainty bound.

#include "chronos/lattice.hpp"
#include "chronos/opalg.hpp"

namespace chronos {

constexpr double kDriftThreshold = 1e-10;

struct UncertaintyReport {
  double delta_a = 0.0;
  double delta_h = 0.0;
  double drift = 0.0;      // <dA/dt>
  double delta_t2 = 0.0;   // delta_a / |drift|
  double bound_lhs = 0.0;  // delta_t2 * delta_h
  bool satisfied = false;  // bound_lhs >= 1/2 - 1e-9
};

// Delta A = sqrt(<A^2> - <A>^2), evaluated as ||(A - <A>) psi|| so it cannot
// go negative. The state must be normalized (|norm - 1| <= 1e-10) and A
// Hermitian (defect <= 1e-10).
double variance(const LinearOperator& a, const StateVector& state);
double variance(const LinearOperator& a, const SpinorState& state);

// <psi|[A, B]|psi> by operator application.
cplx average_commutator(const LinearOperator& a, const LinearOperator& b, const StateVector& state);

// <dA/dt> = -i <[A, H]>. Complex so callers can inspect the imaginary part.
cplx heisenberg_drift(const LinearOperator& a, const LinearOperator& h, const StateVector& state,
                      CommutatorRoute route);

// Fills the report and checks Delta T2 * Delta H >= 1/2. Throws ZeroDrift when
// |<dA/dt>| <= kDriftThreshold.
UncertaintyReport mt_time_deviation(const LinearOperator& a, const LinearOperator& h,
                                    const StateVector& state,
                                    CommutatorRoute route = CommutatorRoute::Matrix);

}  // namespace chronos
