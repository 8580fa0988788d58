#include "chronos/uncertainty.hpp"

#include <cmath>

namespace chronos {

namespace {

void require_normalized(double norm) {
  if (std::abs(norm - 1.0) > 1e-10) {
    throw Error(ErrorKind::Unnormalized, "state must be normalized", norm);
  }
}

void require_hermitian(const LinearOperator& a) {
  const double defect = hermiticity_defect(a);
  if (defect > 1e-10) {
    throw Error(ErrorKind::NonHermitian, "operator is not self-adjoint", defect);
  }
}

// ||(A - <A>) v|| * sqrt(step) for a unit-norm state.
double spread(const LinearOperator& a, const Eigen::VectorXcd& v, double step) {
  const Eigen::VectorXcd av = a.apply(v);
  const double mean = v.dot(av).real() * step;
  return (av - mean * v).norm() * std::sqrt(step);
}

}  // namespace

double variance(const LinearOperator& a, const StateVector& state) {
  require_normalized(state.norm());
  require_hermitian(a);
  if (a.spin_dim() != 1 || !same_lattice(a.grid(), state.grid())) {
    throw Error(ErrorKind::ShapeMismatch, "operator and state live on different spaces");
  }
  return spread(a, state.amplitudes(), state.grid().step());
}

double variance(const LinearOperator& a, const SpinorState& state) {
  require_normalized(state.norm());
  require_hermitian(a);
  if (a.spin_dim() != 2 || !same_lattice(a.grid(), state.grid())) {
    throw Error(ErrorKind::ShapeMismatch, "operator and spinor live on different spaces");
  }
  return spread(a, state.amplitudes(), state.grid().step());
}

cplx average_commutator(const LinearOperator& a, const LinearOperator& b, const StateVector& state) {
  if (a.dim() != b.dim() || a.spin_dim() != 1 || !same_lattice(a.grid(), state.grid()) ||
      !same_lattice(b.grid(), state.grid())) {
    throw Error(ErrorKind::ShapeMismatch, "average commutator of mismatched operators");
  }
  const Eigen::VectorXcd& v = state.amplitudes();
  const cplx ab = v.dot(a.apply(b.apply(v)));
  const cplx ba = v.dot(b.apply(a.apply(v)));
  return (ab - ba) / v.squaredNorm();
}

cplx heisenberg_drift(const LinearOperator& a, const LinearOperator& h, const StateVector& state,
                      CommutatorRoute route) {
  constexpr cplx minus_i{0.0, -1.0};
  if (route == CommutatorRoute::Canonical) {
    return minus_i * expectation(canonical_commutator(a, h), state);
  }
  return minus_i * average_commutator(a, h, state);
}

UncertaintyReport mt_time_deviation(const LinearOperator& a, const LinearOperator& h,
                                    const StateVector& state, CommutatorRoute route) {
  UncertaintyReport r;
  r.delta_a = variance(a, state);
  r.delta_h = variance(h, state);
  const cplx drift = heisenberg_drift(a, h, state, route);
  if (std::abs(drift) <= kDriftThreshold) {
    throw Error(ErrorKind::ZeroDrift, "<dA/dt> vanishes in this state", std::abs(drift));
  }
  r.drift = drift.real();
  r.delta_t2 = r.delta_a / std::abs(r.drift);
  r.bound_lhs = r.delta_t2 * r.delta_h;
  r.satisfied = r.bound_lhs >= 0.5 - 1e-9;
  return r;
}

}  // namespace chronos
