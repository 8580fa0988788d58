#include "doctest.h"

#include <cmath>

#include "chronos/lattice.hpp"
#include "chronos/opalg.hpp"
#include "chronos/time_construct.hpp"
#include "chronos/uncertainty.hpp"
#include "oracles.hpp"

using namespace chronos;

namespace {

const double kStep = 10.0 / 512.0;

LinearOperator momentum_op(const Grid& g) {
  return multiplication_operator(
      g, [](double p) { return cplx{p, 0.0}; }, [](double) { return cplx{1.0, 0.0}; });
}

}  // namespace

TEST_CASE("variance of an eigenstate is zero") {
  const Grid g = offset_momentum_grid(16, 1.0);
  Amplitudes a = Amplitudes::Zero(16);
  a[5] = 1.0;
  CHECK(variance(momentum_op(g), StateVector(g, a)) == 0.0);
}

TEST_CASE("two-level superposition has spread one half") {
  const Grid g = make_grid(2, 0.0, 1.0, Representation::EnergyHalfLine);
  const LinearOperator a = multiplication_operator(g, [](double e) { return cplx{e, 0.0}; });
  Amplitudes v(2);
  v << 1.0 / std::sqrt(2.0), cplx{0.0, 1.0 / std::sqrt(2.0)};
  CHECK(variance(a, StateVector(g, v)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Gaussian momentum spread") {
  const Grid g = offset_momentum_grid(512, kStep);
  for (double s : {0.05, 0.1, 0.15}) {
    const StateVector psi = gaussian_state(g, 2.0, s, -10.0);
    CHECK(std::abs(variance(momentum_op(g), psi) - s) <= 1e-6);
  }
}

TEST_CASE("variance is shift invariant") {
  const Grid g = offset_momentum_grid(512, kStep);
  const StateVector psi = gaussian_state(g, 2.0, 0.1, 3.0);
  const LinearOperator x = conjugate_coordinate(g);
  const double base = variance(x, psi);
  for (double c : {1.0, 1e3}) {
    const LinearOperator shifted = x + cplx{c, 0.0} * identity_operator(g);
    CHECK(std::abs(variance(shifted, psi) - base) <= 1e-9);
  }
}

TEST_CASE("variance preconditions") {
  const Grid g = offset_momentum_grid(8, 1.0);
  const StateVector unnormalized(g, Amplitudes::Ones(8));
  try {
    variance(momentum_op(g), unnormalized);
    FAIL("expected unnormalized error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Unnormalized);
  }
  Eigen::MatrixXcd nh = Eigen::MatrixXcd::Zero(8, 8);
  nh(0, 1) = 1.0;
  try {
    variance(LinearOperator(g, 1, nh), unnormalized.normalized());
    FAIL("expected non-Hermitian error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonHermitian);
  }
}

TEST_CASE("spinor variance") {
  const Grid g = offset_momentum_grid(8, 1.0);
  Eigen::Matrix2cd sz;
  sz << 1.0, 0.0, 0.0, -1.0;
  const LinearOperator s = with_spin(sz, identity_operator(g));
  // equal weight in both components: <sz> = 0, spread 1
  const SpinorState psi = SpinorState(g, Amplitudes::Ones(8), Amplitudes::Ones(8)).normalized();
  CHECK(variance(s, psi) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("linear potential drift is -m g") {
  const Grid g = offset_momentum_grid(512, kStep);
  for (double m : {0.5, 1.0, 2.0}) {
    for (double gr : {0.3, 1.0, 9.81}) {
      const LinearOperator h = linear_potential_hamiltonian(g, m, gr);
      const StateVector psi = gaussian_state(g, 2.0, 0.05, -10.0);
      const cplx d = heisenberg_drift(momentum_op(g), h, psi, CommutatorRoute::Canonical);
      CHECK(std::abs(d - cplx{-m * gr, 0.0}) <= 1e-14 * m * gr);
      const UncertaintyReport r = mt_time_deviation(momentum_op(g), h, psi, CommutatorRoute::Canonical);
      CHECK(r.drift == doctest::Approx(-m * gr).epsilon(1e-14));
      CHECK(r.delta_t2 == doctest::Approx(r.delta_a / (m * gr)));
      CHECK(r.satisfied);
    }
  }
}

TEST_CASE("stationary states have no drift") {
  const Grid g = offset_momentum_grid(64, 0.1);
  Amplitudes a = Amplitudes::Zero(64);
  a[40] = 1.0 / std::sqrt(0.1);
  try {
    mt_time_deviation(conjugate_coordinate(g), free_hamiltonian(g, 1.0), StateVector(g, a));
    FAIL("expected zero drift");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroDrift);
  }
}

TEST_CASE("Robertson bound on random states") {
  const Grid g = offset_momentum_grid(96, 0.1);
  const LinearOperator h = free_hamiltonian(g, 1.0);
  const LinearOperator x = conjugate_coordinate(g);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const StateVector psi(g, oracle::random_state(96, seed, g.step()));
    const UncertaintyReport r = mt_time_deviation(x, h, psi);
    // independent oracle: Delta A Delta H >= |<[A, H]>| / 2
    const cplx c = average_commutator(x, h, psi);
    CHECK(r.delta_a * r.delta_h >= 0.5 * std::abs(c) - 1e-9);
    CHECK(r.satisfied);
    CHECK(r.bound_lhs >= 0.5 - 1e-9);
  }
}

TEST_CASE("average commutator") {
  const Grid g = offset_momentum_grid(512, kStep);
  const StateVector psi = gaussian_state(g, 2.0, 0.05, -10.0);
  const LinearOperator x = conjugate_coordinate(g);
  CHECK(average_commutator(x, x, psi) == cplx{0.0, 0.0});
  CHECK(std::abs(average_commutator(x, momentum_op(g), psi) - cplx{0.0, 1.0}) <= 1e-8);

  const LinearOperator h = linear_potential_hamiltonian(g, 1.0, 1.0);
  const auto t2 = t2_mandelstam(momentum_op(g), h, psi);
  CHECK(std::abs(average_commutator(h, t2.op, psi) - cplx{0.0, 1.0}) <= 1e-8);

  CHECK_THROWS_AS(average_commutator(x, conjugate_coordinate(offset_momentum_grid(64, kStep)), psi), Error);
}
