#include "chronos/time_construct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chronos {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_positive_mass(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) {
    throw Error(ErrorKind::InvalidArgument, "mass must be positive and finite");
  }
}

void require_momentum_grid(const Grid& g) {
  if (g.rep() != Representation::Momentum) {
    throw Error(ErrorKind::GridMismatch, "expected a momentum grid");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Dirac algebra

DiracAlgebra DiracAlgebra::standard() {
  DiracAlgebra a;
  a.alpha1 << 0.0, 1.0, 1.0, 0.0;
  a.beta << 1.0, 0.0, 0.0, -1.0;
  return a;
}

double DiracAlgebra::invariant_defect() const {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const double a2 = (alpha1 * alpha1 - id).cwiseAbs().maxCoeff();
  const double b2 = (beta * beta - id).cwiseAbs().maxCoeff();
  const double anti = (alpha1 * beta + beta * alpha1).cwiseAbs().maxCoeff();
  return std::max({a2, b2, anti});
}

void DiracAlgebra::validate() const {
  const double defect = invariant_defect();
  if (defect > 1e-15) {
    throw Error(ErrorKind::PreconditionViolated, "Dirac matrices violate the algebra", defect);
  }
}

std::string_view to_string(TimeKind kind) noexcept {
  switch (kind) {
    case TimeKind::T1: return "T1";
    case TimeKind::T2: return "T2";
    case TimeKind::NonRel: return "NonRel";
    case TimeKind::KleinGordon: return "KleinGordon";
    case TimeKind::KleinGordonEnergyRep: return "KleinGordonEnergyRep";
    case TimeKind::Dirac: return "Dirac";
    case TimeKind::ProperTime: return "ProperTime";
    case TimeKind::RestrictionT: return "RestrictionT";
  }
  return "unknown";
}

int expected_commutator_sign(TimeKind kind) noexcept {
  switch (kind) {
    case TimeKind::RestrictionT:
    case TimeKind::ProperTime:
      return -1;
    default:
      return +1;
  }
}

// ---------------------------------------------------------------------------
// From a dynamical variable

TimeOperatorBundle t1_from_dynamical(const LinearOperator& f, const LinearOperator& h,
                                     std::span<const StateVector> probes, CommutatorRoute route) {
  if (f.spin_dim() != 1 || h.spin_dim() != 1) {
    throw Error(ErrorKind::ShapeMismatch, "t1_from_dynamical works on scalar operators");
  }
  const LinearOperator c =
      route == CommutatorRoute::Canonical ? canonical_commutator(f, h) : commutator(f, h);

  Eigen::VectorXd sv;
  if (c.is_diagonal()) {
    sv = c.matrix().diagonal().cwiseAbs();
  } else {
    sv = c.matrix().bdcSvd().singularValues();
  }
  const double smax = sv.maxCoeff();
  const double smin = sv.minCoeff();
  if (!(smax > 0.0) || smin <= 1e-10 * smax) {
    const double ratio = smax > 0.0 ? smin / smax : 0.0;
    throw Error(ErrorKind::SingularCommutator, "[F, H] is not invertible on this grid", ratio);
  }

  Eigen::MatrixXcd cinv_m;
  if (c.is_diagonal()) {
    cinv_m = c.matrix().diagonal().cwiseInverse().asDiagonal().toDenseMatrix();
  } else {
    cinv_m = c.matrix().partialPivLu().inverse();
  }
  const LinearOperator cinv(c.grid(), 1, std::move(cinv_m));

  // [C^-1, H] = 0 is what makes T1 conjugate to H.
  double residual = 0.0;
  if (!probes.empty()) {
    for (const StateVector& psi : probes) {
      const Eigen::VectorXcd a = cinv.apply(h.apply(psi.amplitudes()));
      const Eigen::VectorXcd b = h.apply(cinv.apply(psi.amplitudes()));
      residual = std::max(residual, relative_residual(b, a));
    }
  } else if (!(cinv.is_diagonal() && h.is_diagonal())) {
    const double scale = cinv.matrix().norm() * h.matrix().norm();
    residual = commutator(cinv, h).matrix().norm() / std::max(scale, 1e-300);
  }
  if (residual > 1e-8) {
    std::ostringstream msg;
    msg << "[[F, H]^-1, H] does not vanish (residual " << residual << ")";
    throw Error(ErrorKind::PreconditionViolated, msg.str(), residual);
  }

  LinearOperator t = symmetrize(f, cinv);
  t *= -kI;
  return {std::move(t), TimeKind::T1, expected_commutator_sign(TimeKind::T1), std::nullopt};
}

LinearOperator free_hamiltonian(const Grid& momentum, double m) {
  require_positive_mass(m);
  require_momentum_grid(momentum);
  return multiplication_operator(
      momentum, [m](double p) { return cplx{p * p / (2.0 * m), 0.0}; },
      [m](double p) { return cplx{p / m, 0.0}; });
}

LinearOperator linear_potential_hamiltonian(const Grid& momentum, double m, double g) {
  LinearOperator h = free_hamiltonian(momentum, m);
  return h + (m * g) * conjugate_coordinate(momentum);
}

TimeOperatorBundle t_free_nonrel(double m, const Grid& momentum) {
  require_positive_mass(m);
  require_momentum_grid(momentum);
  const LinearOperator pinv = inverse_momentum(momentum);
  const LinearOperator x = conjugate_coordinate(momentum);
  LinearOperator t = symmetrize(pinv, x);
  t *= -m;
  return {std::move(t), TimeKind::NonRel, expected_commutator_sign(TimeKind::NonRel), std::nullopt};
}

TimeOperatorBundle proper_time(double m, const Grid& momentum) {
  require_positive_mass(m);
  require_momentum_grid(momentum);
  const LinearOperator pinv = inverse_momentum(momentum);
  const LinearOperator x = conjugate_coordinate(momentum);
  LinearOperator t = symmetrize(pinv, x);
  t *= m;
  return {std::move(t), TimeKind::ProperTime, expected_commutator_sign(TimeKind::ProperTime),
          std::nullopt};
}

// ---------------------------------------------------------------------------
// Averaged (Mandelstam-Tamm) operator

TimeOperatorBundle t2_mandelstam(const LinearOperator& a, const LinearOperator& h,
                                 const StateVector& state, CommutatorRoute route) {
  const double defect = hermiticity_defect(a);
  if (defect > 1e-10) {
    throw Error(ErrorKind::NonHermitian, "dynamical variable is not self-adjoint", defect);
  }
  const cplx drift = heisenberg_drift(a, h, state, route);
  if (std::abs(drift) <= kDriftThreshold) {
    throw Error(ErrorKind::ZeroDrift, "<dA/dt> vanishes in this state", std::abs(drift));
  }
  if (std::abs(drift.imag()) > 1e-10 * std::max(1.0, std::abs(drift))) {
    throw Error(ErrorKind::PreconditionViolated, "<dA/dt> is not real", drift.imag());
  }
  LinearOperator t = a;
  t *= -1.0 / drift.real();
  return {std::move(t), TimeKind::T2, expected_commutator_sign(TimeKind::T2), state};
}

// ---------------------------------------------------------------------------
// Relativistic arrival times

LinearOperator t_relativistic_general(const LinearOperator& h, const Grid& momentum) {
  require_momentum_grid(momentum);
  if (!same_lattice(h.grid(), momentum)) {
    throw Error(ErrorKind::ShapeMismatch, "Hamiltonian is bound to a different grid");
  }
  LinearOperator x = conjugate_coordinate(momentum);
  LinearOperator pinv = inverse_momentum(momentum);
  if (h.spin_dim() == 2) {
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    x = with_spin(id, x);
    pinv = with_spin(id, pinv);
  }
  const LinearOperator k = pinv * x + x * pinv;
  LinearOperator t = h * k + k * h + (pinv * h) * x + x * (h * pinv);
  t *= -1.0 / 6.0;
  return t;
}

double kg_mass_correction(double m, double p) {
  const double e = std::sqrt(p * p + m * m);
  return -m * m / (2.0 * e * (e * e - m * m));
}

TimeOperatorBundle t_kg_momentum(double m, const Grid& momentum) {
  require_momentum_grid(momentum);
  if (!(m >= 0.0)) throw Error(ErrorKind::InvalidArgument, "mass must be non-negative");
  if (!(momentum.front() > 0.0)) {
    throw Error(ErrorKind::ZeroMomentum, "Klein-Gordon momentum form needs all p > 0");
  }
  const auto n = static_cast<Eigen::Index>(momentum.size());
  const Eigen::MatrixXcd d = derivative_operator(momentum, DerivativeScheme::Spectral).matrix();
  Eigen::VectorXd p(n), e(n), ratio(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    p[k] = momentum.point(static_cast<std::size_t>(k));
    e[k] = std::sqrt(p[k] * p[k] + m * m);
    ratio[k] = e[k] / p[k];
  }
  Eigen::MatrixXcd t(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double bracket = (2.0 * ratio[j] + 2.0 * ratio[k]) + (e[j] / p[k] + e[k] / p[j]);
      t(j, k) = cplx{0.0, -1.0 / 6.0} * (d(j, k) * bracket);
    }
  }
  return {LinearOperator(momentum, 1, std::move(t)), TimeKind::KleinGordon,
          expected_commutator_sign(TimeKind::KleinGordon), std::nullopt};
}

LinearOperator kg_closed_form(double m, const Grid& momentum) {
  require_momentum_grid(momentum);
  if (!(momentum.front() > 0.0)) {
    throw Error(ErrorKind::ZeroMomentum, "Klein-Gordon momentum form needs all p > 0");
  }
  const auto n = static_cast<Eigen::Index>(momentum.size());
  Eigen::MatrixXcd t = derivative_operator(momentum, DerivativeScheme::Spectral).matrix();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double p = momentum.point(static_cast<std::size_t>(j));
    const double e = std::sqrt(p * p + m * m);
    t.row(j) *= e / p;
    t(j, j) += kg_mass_correction(m, p);
  }
  t *= -kI;
  return LinearOperator(momentum, 1, std::move(t));
}

LinearOperator kg_measure_operator(double m, const Grid& momentum) {
  require_momentum_grid(momentum);
  if (!(momentum.front() > 0.0)) {
    throw Error(ErrorKind::ZeroMomentum, "measure map needs all p > 0");
  }
  return multiplication_operator(momentum, [m](double p) {
    return cplx{kg_measure_factor(std::sqrt(p * p + m * m), m), 0.0};
  });
}

TimeOperatorBundle t_kg_energy_rep(const Grid& energy, DerivativeScheme scheme) {
  if (energy.rep() != Representation::EnergyHalfLine &&
      energy.rep() != Representation::EnergyFullLine) {
    throw Error(ErrorKind::GridMismatch, "expected an energy grid");
  }
  LinearOperator t = derivative_operator(energy, scheme);
  t *= -kI;
  return {std::move(t), TimeKind::KleinGordonEnergyRep,
          expected_commutator_sign(TimeKind::KleinGordonEnergyRep), std::nullopt};
}

LinearOperator dirac_hamiltonian(double m, const Grid& momentum, const DiracAlgebra& algebra) {
  algebra.validate();
  require_momentum_grid(momentum);
  const LinearOperator p =
      multiplication_operator(momentum, [](double q) { return cplx{q, 0.0}; });
  return with_spin(algebra.alpha1, p) + with_spin(algebra.beta, cplx{m, 0.0} * identity_operator(momentum));
}

TimeOperatorBundle t_dirac(double m, const Grid& momentum, const DiracAlgebra& algebra) {
  algebra.validate();
  require_positive_mass(m);
  const LinearOperator x = conjugate_coordinate(momentum);
  const LinearOperator tau = proper_time(m, momentum).op;
  LinearOperator t = with_spin(algebra.alpha1, x) + with_spin(algebra.beta, tau);
  t *= -1.0;
  return {std::move(t), TimeKind::Dirac, expected_commutator_sign(TimeKind::Dirac), std::nullopt};
}

double conjugacy_residual(const LinearOperator& h, const LinearOperator& t, int sign,
                          const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd lhs = h.apply(t.apply(psi)) - t.apply(h.apply(psi));
  const Eigen::VectorXcd want = (static_cast<double>(sign) * kI) * psi;
  return relative_residual(lhs, want);
}

}  // namespace chronos
