#include "doctest.h"

#include <cmath>
#include <numbers>

#include "chronos/dynamics.hpp"
#include "chronos/energy_shift.hpp"
#include "chronos/lattice.hpp"
#include "chronos/opalg.hpp"
#include "chronos/time_construct.hpp"
#include "chronos/uncertainty.hpp"
#include "oracles.hpp"

using namespace chronos;

namespace {

const double kStep = 10.0 / 512.0;

}  // namespace

TEST_CASE("packet prepared in position space gives the same arrival time") {
  const Grid p = offset_momentum_grid(512, kStep);
  const Grid x = centered_position_grid(512, 2.0 * std::numbers::pi / 10.0);
  const double p0 = 2.0, s = 0.05, x0 = -10.0;
  // position-space form of the packet: exp(-s^2 (x - x0)^2) exp(i p0 (x - x0))
  Amplitudes a(512);
  for (std::size_t j = 0; j < 512; ++j) {
    const double xj = x.point(j);
    a[static_cast<Eigen::Index>(j)] = std::exp(-s * s * (xj - x0) * (xj - x0)) * std::polar(1.0, p0 * (xj - x0));
  }
  const StateVector from_x = position_to_momentum(StateVector(x, a).normalized(), p);
  const StateVector direct = gaussian_state(p, p0, s, x0);
  // equal up to a global phase
  const cplx overlap = direct.inner(from_x);
  CHECK(std::abs(std::abs(overlap) - 1.0) <= 1e-9);

  const auto t1 = t1_from_dynamical(conjugate_coordinate(p), free_hamiltonian(p, 1.0));
  CHECK(expectation(t1.op, from_x).real() == doctest::Approx(expectation(t1.op, direct).real()).epsilon(1e-9));
}

TEST_CASE("interpolated energy representation reproduces the momentum-form operator") {
  const Grid p = make_grid(512, 0.5, kStep, Representation::Momentum);
  const Grid e = make_grid(1024, 0.0, kStep, Representation::EnergyHalfLine);
  const double m = 1.0;
  const auto sym = t_kg_momentum(m, p);
  const auto te = t_kg_energy_rep(e);
  const StateVector psi = gaussian_state(p, 5.0, 0.25, 0.5);
  const StateVector phi = momentum_to_energy(psi, m, e);
  const StateVector back = energy_to_momentum(StateVector(e, te.op.apply(phi.amplitudes())), m, p);
  CHECK(relative_residual(back.amplitudes(), sym.op.apply(psi.amplitudes())) <= 1e-4);
}

TEST_CASE("T2 drifts at unit rate in the linear potential") {
  const Grid g = offset_momentum_grid(256, 10.0 / 256.0);
  const double m = 1.0, gr = 0.5;
  const LinearOperator h = linear_potential_hamiltonian(g, m, gr);
  const StateVector psi = gaussian_state(g, 1.5, 0.1, 0.0);
  const auto t2 = t2_mandelstam(
      multiplication_operator(g, [](double q) { return cplx{q, 0.0}; }, [](double) { return cplx{1.0, 0.0}; }),
      h, psi, CommutatorRoute::Canonical);
  const ExpectationSeries s = expectation_series(t2.op, psi, h, linspace(0.0, 1.0, 11));
  CHECK(std::abs(s.fitted_slope + 1.0) <= 1e-6);
  const UncertaintyReport u = mt_time_deviation(t2.op, h, psi);
  CHECK(u.satisfied);
}

TEST_CASE("shifting the reference energy commutes with evolution up to a phase") {
  const EnergyLatticePair lat = make_energy_lattice(64, 0.5);
  Amplitudes a = Amplitudes::Zero(129);
  a.segment(20, 89) = oracle::random_state(89, 11, 0.5);
  const StateVector psi = StateVector(lat.full, a).normalized();
  const Propagator u0(hamiltonian_h0(lat.full));
  for (int j : {-12, -3, 5, 17}) {
    const double e = j * lat.delta_e;
    const double t = 0.7;
    const StateVector lhs = u0.evolve(v_shift_full(psi, j, lat).state, t);
    const StateVector moved = Propagator(hamiltonian_at(lat.full, e)).evolve(psi, t);
    const StateVector rhs = v_shift_full(moved, j, lat).state;
    CHECK(oracle::max_abs_diff(lhs.amplitudes(), rhs.amplitudes()) <= 1e-12);
  }
}

TEST_CASE("Dirac arrival time drifts at unit rate") {
  const Grid g = offset_momentum_grid(128, 10.0 / 128.0);
  const DiracAlgebra alg = DiracAlgebra::standard();
  const LinearOperator hd = dirac_hamiltonian(1.0, g, alg);
  const auto td = t_dirac(1.0, g, alg);
  const StateVector up = gaussian_state(g, 2.0, 0.1, -3.0);
  const SpinorState psi = SpinorState(g, up.amplitudes(), cplx{0.4, 0.0} * up.amplitudes()).normalized();
  const Propagator u(hd);
  std::vector<double> times = linspace(0.0, 1.0, 6), values;
  for (double t : times) {
    const SpinorState s(g, u.apply(psi.amplitudes(), t));
    values.push_back(expectation(td.op, s).real());
  }
  CHECK(std::abs(fit_line(times, values).slope + 1.0) <= 1e-3);
}
