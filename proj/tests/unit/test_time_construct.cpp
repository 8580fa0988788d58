#include "doctest.h"

#include <cmath>
#include <numbers>

#include "chronos/lattice.hpp"
#include "chronos/opalg.hpp"
#include "chronos/time_construct.hpp"
#include "oracles.hpp"

using namespace chronos;

namespace {

const double kStep = 10.0 / 512.0;
constexpr cplx kI{0.0, 1.0};

Grid standard_grid() { return offset_momentum_grid(512, kStep); }
Grid kg_grid() { return make_grid(512, 0.5, kStep, Representation::Momentum); }

LinearOperator momentum_op(const Grid& g) {
  return multiplication_operator(
      g, [](double p) { return cplx{p, 0.0}; }, [](double) { return cplx{1.0, 0.0}; });
}

LinearOperator energy_op(const Grid& g, double m) {
  return multiplication_operator(g, [m](double p) { return cplx{std::sqrt(p * p + m * m), 0.0}; });
}

double max_residual(const LinearOperator& h, const LinearOperator& t, int sign,
                    const std::vector<StateVector>& suite) {
  double r = 0.0;
  for (const auto& s : suite) r = std::max(r, conjugacy_residual(h, t, sign, s.amplitudes()));
  return r;
}

}  // namespace

TEST_CASE("Dirac algebra") {
  const DiracAlgebra a = DiracAlgebra::standard();
  CHECK(a.invariant_defect() == 0.0);
  CHECK_NOTHROW(a.validate());
  DiracAlgebra bad = a;
  bad.beta = Eigen::Matrix2cd::Identity();
  CHECK(bad.invariant_defect() > 1.0);
  CHECK_THROWS_AS(bad.validate(), Error);
  CHECK_THROWS_AS(t_dirac(1.0, standard_grid(), bad), Error);
}

TEST_CASE("commutator signs per kind") {
  CHECK(expected_commutator_sign(TimeKind::T1) == 1);
  CHECK(expected_commutator_sign(TimeKind::NonRel) == 1);
  CHECK(expected_commutator_sign(TimeKind::KleinGordon) == 1);
  CHECK(expected_commutator_sign(TimeKind::KleinGordonEnergyRep) == 1);
  CHECK(expected_commutator_sign(TimeKind::Dirac) == 1);
  CHECK(expected_commutator_sign(TimeKind::T2) == 1);
  CHECK(expected_commutator_sign(TimeKind::RestrictionT) == -1);
  CHECK(expected_commutator_sign(TimeKind::ProperTime) == -1);
}

TEST_CASE("T1 from x and the free Hamiltonian") {
  const Grid g = standard_grid();
  const double m = 1.0;
  const LinearOperator h = free_hamiltonian(g, m);
  const auto t1 = t1_from_dynamical(conjugate_coordinate(g), h);
  CHECK(t1.kind == TimeKind::T1);

  // -m (p^-1 x + x p^-1) / 2 built by hand
  const LinearOperator x = conjugate_coordinate(g);
  const LinearOperator pinv = inverse_momentum(g);
  const LinearOperator ref = cplx{-m / 2.0, 0.0} * (pinv * x + x * pinv);
  CHECK(entrywise_distance(t1.op, ref) <= 1e-12);

  const StateVector psi = gaussian_state(g, 2.0, 0.05, -10.0);
  CHECK(conjugacy_residual(h, t1.op, +1, psi.amplitudes()) <= 1e-6);
}

TEST_CASE("matrix commutator route checks the precondition") {
  const Grid g = make_grid(6, 0.0, 1.0, Representation::Position);
  Eigen::MatrixXcd fm = Eigen::MatrixXcd::Zero(6, 6);
  for (int k = 0; k < 6; ++k) fm(k, k) = static_cast<double>(k);
  Eigen::MatrixXcd hm = Eigen::MatrixXcd::Zero(6, 6);
  for (int k = 0; k < 5; ++k) hm(k, k + 1) = hm(k + 1, k) = 1.0;
  const LinearOperator f(g, 1, fm), h(g, 1, hm);
  CHECK_THROWS_AS(t1_from_dynamical(f, h, {}, CommutatorRoute::Matrix), Error);
}

TEST_CASE("T1 error paths") {
  const Grid g = standard_grid();
  const LinearOperator h = free_hamiltonian(g, 1.0);
  try {
    t1_from_dynamical(momentum_op(g), h);
    FAIL("expected singular commutator");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularCommutator);
  }
  // Linear potential: [x, H] = i p / m does not commute with H.
  const LinearOperator hv = linear_potential_hamiltonian(g, 1.0, 1.0);
  const auto suite = interior_gaussian_suite(g, 3);
  try {
    t1_from_dynamical(conjugate_coordinate(g), hv, suite);
    FAIL("expected precondition violation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PreconditionViolated);
    REQUIRE(e.residual().has_value());
    CHECK(*e.residual() > 1e-8);
  }
}

TEST_CASE("T_non scales with m and has the classical mean") {
  const Grid g = standard_grid();
  const auto t1 = t_free_nonrel(1.0, g);
  const auto t2 = t_free_nonrel(2.0, g);
  CHECK(entrywise_distance(t2.op, cplx{2.0, 0.0} * t1.op) == 0.0);
  CHECK(hermiticity_defect(t1.op) <= 1e-12);

  const StateVector psi = gaussian_state(g, 2.0, 0.05, -10.0);
  const double mean = expectation(t1.op, psi).real();
  CHECK(std::abs(mean - 5.0) <= 0.05);
  // <T_non> = -m x0 <1/p> for this packet.
  CHECK(mean == doctest::Approx(10.0 * oracle::inverse_momentum_mean(2.0, 0.05)).epsilon(1e-9));
}

TEST_CASE("proper time is minus T_non") {
  const Grid g = standard_grid();
  const auto tau = proper_time(1.0, g);
  const auto tn = t_free_nonrel(1.0, g);
  CHECK((tau.op + tn.op).matrix().cwiseAbs().maxCoeff() == 0.0);
  CHECK(entrywise_distance(proper_time(2.0, g).op, cplx{2.0, 0.0} * tau.op) == 0.0);
  const StateVector psi = gaussian_state(g, 2.0, 0.05, -10.0);
  CHECK(std::abs(expectation(tau.op, psi).real() + 5.0) <= 0.05);
  CHECK(max_residual(free_hamiltonian(g, 1.0), tau.op, -1, interior_gaussian_suite(g)) <= 1e-6);
}

TEST_CASE("T2 for the linear potential") {
  const Grid g = standard_grid();
  const double m = 1.5, gr = 0.8;
  const LinearOperator h = linear_potential_hamiltonian(g, m, gr);
  const LinearOperator p = momentum_op(g);
  const StateVector psi = gaussian_state(g, 2.0, 0.05, -10.0);

  for (auto route : {CommutatorRoute::Canonical, CommutatorRoute::Matrix}) {
    const auto t2 = t2_mandelstam(p, h, psi, route);
    CHECK(t2.kind == TimeKind::T2);
    REQUIRE(t2.defining_state.has_value());
    CHECK(entrywise_distance(t2.op, cplx{1.0 / (m * gr), 0.0} * p) <= 1e-12);
    CHECK(hermiticity_defect(t2.op) <= 1e-12);
    CHECK(max_residual(h, t2.op, +1, interior_gaussian_suite(g)) <= 1e-6);
  }
}

TEST_CASE("T2 needs a drift") {
  const Grid g = standard_grid();
  const StateVector psi = gaussian_state(g, 2.0, 0.05, -10.0);
  try {
    t2_mandelstam(momentum_op(g), free_hamiltonian(g, 1.0), psi);
    FAIL("expected zero drift");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroDrift);
  }
  Eigen::MatrixXcd nh = Eigen::MatrixXcd::Zero(512, 512);
  nh(0, 1) = 1.0;
  CHECK_THROWS_AS(t2_mandelstam(LinearOperator(g, 1, nh), free_hamiltonian(g, 1.0), psi), Error);
}

TEST_CASE("general relativistic form with constant H is T_non at m = 1") {
  const Grid g = offset_momentum_grid(128, 0.05);
  const LinearOperator t = t_relativistic_general(identity_operator(g), g);
  CHECK(entrywise_distance(t, t_free_nonrel(1.0, g).op) <= 1e-12);
  CHECK(hermiticity_defect(t) <= 1e-10);
}

TEST_CASE("Klein-Gordon forms agree") {
  const Grid g = kg_grid();
  const auto suite = interior_gaussian_suite(g);
  for (double m : {0.0, 0.5, 1.0, 3.0}) {
    const auto sym = t_kg_momentum(m, g);
    CHECK(sym.kind == TimeKind::KleinGordon);
    CHECK(entrywise_distance(t_relativistic_general(energy_op(g, m), g), sym.op) <= 1e-12);
    CHECK(hermiticity_defect(sym.op) <= 1e-10);
    CHECK(max_residual(energy_op(g, m), sym.op, +1, suite) <= 1e-6);
    const LinearOperator closed = kg_closed_form(m, g);
    for (const auto& s : suite) {
      CHECK(relative_residual(closed.apply(s.amplitudes()), sym.op.apply(s.amplitudes())) <= 1e-6);
    }
  }
}

TEST_CASE("massless closed form is -i D") {
  const Grid g = kg_grid();
  LinearOperator d = derivative_operator(g, DerivativeScheme::Spectral);
  d *= -kI;
  CHECK(entrywise_distance(kg_closed_form(0.0, g), d) == 0.0);
}

TEST_CASE("mass correction value") {
  CHECK(kg_mass_correction(1.0, 1.0) == doctest::Approx(-1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-15));
  CHECK(kg_mass_correction(1.0, 1.0) == doctest::Approx(-0.35355).epsilon(1e-5));
  const Grid g = make_grid(3, 0.0, 1.0, Representation::Momentum);
  CHECK_THROWS_AS(t_kg_momentum(1.0, g), Error);
  CHECK_THROWS_AS(kg_closed_form(1.0, standard_grid()), Error);
}

TEST_CASE("measure conjugation carries the momentum form to -i d/dE") {
  const Grid g = kg_grid();
  const double m = 1.0;
  const auto sym = t_kg_momentum(m, g);
  const LinearOperator w = kg_measure_operator(m, g);
  // W^-1 (-i (E/p) D) W, with E/p = dE/dp inverted.
  const Eigen::VectorXd wd = w.matrix().diagonal().real();
  const Eigen::MatrixXcd d = derivative_operator(g, DerivativeScheme::Spectral).matrix();
  Eigen::MatrixXcd chain(512, 512);
  for (Eigen::Index j = 0; j < 512; ++j) {
    const double p = g.point(static_cast<std::size_t>(j));
    for (Eigen::Index k = 0; k < 512; ++k) {
      chain(j, k) = -kI * (std::sqrt(p * p + m * m) / p) * d(j, k) * wd[k] / wd[j];
    }
  }
  for (const auto& s : interior_gaussian_suite(g)) {
    CHECK(relative_residual(chain * s.amplitudes(), sym.op.apply(s.amplitudes())) <= 1e-6);
  }
}

TEST_CASE("energy representation operator") {
  const double L = 40.0;
  const std::size_t n = 400;
  const Grid e = make_grid(n, 0.0, L / static_cast<double>(n), Representation::EnergyHalfLine);
  const auto t = t_kg_energy_rep(e);
  CHECK(t.kind == TimeKind::KleinGordonEnergyRep);
  const double w = 2.0 * std::numbers::pi * 7.0 / L;
  Eigen::VectorXcd f(n);
  for (std::size_t k = 0; k < n; ++k) f[static_cast<Eigen::Index>(k)] = std::polar(1.0, w * e.point(k));
  CHECK(oracle::max_abs_diff(t.op.apply(f), w * f) <= 1e-8);
  CHECK(t.op.apply(Eigen::VectorXcd::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12);

  const LinearOperator h = multiplication_operator(e, [](double v) { return cplx{v, 0.0}; });
  Amplitudes g(n);
  for (std::size_t k = 0; k < n; ++k) g[static_cast<Eigen::Index>(k)] = std::exp(-std::pow(e.point(k) - 20.0, 2) / 8.0);
  CHECK(conjugacy_residual(h, t.op, +1, g) <= 1e-6);
  CHECK_THROWS_AS(t_kg_energy_rep(standard_grid()), Error);
}

TEST_CASE("Dirac operator") {
  const Grid g = standard_grid();
  const DiracAlgebra alg = DiracAlgebra::standard();
  const double m = 1.0;
  const LinearOperator hd = dirac_hamiltonian(m, g, alg);
  CHECK(hd.spin_dim() == 2);

  const LinearOperator h2 = hd * hd;
  Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(1024, 1024);
  for (std::size_t k = 0; k < 512; ++k) {
    const double p = g.point(k);
    want(k, k) = want(k + 512, k + 512) = p * p + m * m;
  }
  CHECK((h2.matrix() - want).cwiseAbs().maxCoeff() == 0.0);

  const auto td = t_dirac(m, g, alg);
  CHECK(td.kind == TimeKind::Dirac);
  CHECK(hermiticity_defect(td.op) <= 1e-10);
  const LinearOperator general = t_relativistic_general(hd, g);
  for (const auto& s : interior_gaussian_suite(g)) {
    const SpinorState sp = SpinorState(g, s.amplitudes(), cplx{0.3, -0.2} * s.amplitudes()).normalized();
    CHECK(conjugacy_residual(hd, td.op, +1, sp.amplitudes()) <= 1e-6);
    CHECK(relative_residual(general.apply(sp.amplitudes()), td.op.apply(sp.amplitudes())) <= 1e-6);
  }
}

TEST_CASE("consistency triangle") {
  for (double m : {0.5, 1.0, 2.0}) {
    const Grid g = standard_grid();
    const auto t1 = t1_from_dynamical(conjugate_coordinate(g), free_hamiltonian(g, m));
    const auto tn = t_free_nonrel(m, g);
    const auto tau = proper_time(m, g);
    CHECK(entrywise_distance(t1.op, tn.op) <= 1e-12);
    CHECK(entrywise_distance(tn.op, -tau.op) <= 1e-12);
    CHECK(entrywise_distance(t1.op, -tau.op) <= 1e-12);
  }
}
