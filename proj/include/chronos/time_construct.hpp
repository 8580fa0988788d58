#pragma once

// Constructors for the time operators: from a dynamical variable, the
// state-averaged (Mandelstam-Tamm) operator, and the quantized classical
// arrival times (nonrelativistic, Klein-Gordon, Dirac, proper time).

#include <optional>
#include <span>
#include <string_view>

#include "chronos/lattice.hpp"
#include "chronos/opalg.hpp"
#include "chronos/uncertainty.hpp"

namespace chronos {

// Dirac matrices in 1+1 dimensions. alpha1^2 = beta^2 = 1 and
// alpha1 beta + beta alpha1 = 0.
struct DiracAlgebra {
  Eigen::Matrix2cd alpha1;
  Eigen::Matrix2cd beta;

  // alpha1 = sigma_x, beta = sigma_z.
  static DiracAlgebra standard();
  // Largest entry of alpha1^2 - 1, beta^2 - 1 and {alpha1, beta}.
  double invariant_defect() const;
  // Throws PreconditionViolated when invariant_defect() > 1e-15.
  void validate() const;
};

enum class TimeKind { T1, T2, NonRel, KleinGordon, KleinGordonEnergyRep, Dirac, ProperTime, RestrictionT };

std::string_view to_string(TimeKind kind) noexcept;

// Sign s in [H, T] = s * i for each kind. The restriction of the energy-shift
// generator carries the opposite sign to the arrival-time operators, and so
// does the proper time (tau = -T_non).
int expected_commutator_sign(TimeKind kind) noexcept;

struct TimeOperatorBundle {
  LinearOperator op;
  TimeKind kind;
  int expected_commutator_sign;
  // State the operator was defined relative to (T2 only).
  std::optional<StateVector> defining_state;
};

// T1 = -i [F C^-1 + C^-1 F] / 2 with C = [F, H]. C must be invertible
// (smallest singular value > 1e-10 * largest) and [C^-1, H] must vanish to
// 1e-8 on `probes` (or in relative Frobenius norm when no probes are given).
TimeOperatorBundle t1_from_dynamical(const LinearOperator& f, const LinearOperator& h,
                                     std::span<const StateVector> probes = {},
                                     CommutatorRoute route = CommutatorRoute::Canonical);

// H = p^2 / 2m with its closed form.
LinearOperator free_hamiltonian(const Grid& momentum, double m);

// H = p^2 / 2m + m g q in the momentum representation (q = i d/dp).
LinearOperator linear_potential_hamiltonian(const Grid& momentum, double m, double g);

// -(i m / 2)(p^-1 D + D p^-1) on an offset momentum grid.
TimeOperatorBundle t_free_nonrel(double m, const Grid& momentum);

// T2 = -A / <dA/dt>, <dA/dt> = -i <[A, H]> in `state`.
TimeOperatorBundle t2_mandelstam(const LinearOperator& a, const LinearOperator& h,
                                 const StateVector& state,
                                 CommutatorRoute route = CommutatorRoute::Matrix);

// -(1/6)[H K + K H + p^-1 H x + x H p^-1] with K = p^-1 x + x p^-1 and x = i D
// (tensored with the spin identity when H is a spinor operator).
LinearOperator t_relativistic_general(const LinearOperator& h, const Grid& momentum);

// Symmetrized scalar Klein-Gordon arrival time on a p > 0 grid, built from
// diagonal scalings of D:
//   -(i/6)[2 (E/p) D + 2 D (E/p) + E D p^-1 + p^-1 D E].
TimeOperatorBundle t_kg_momentum(double m, const Grid& momentum);

// Closed form -i[(E/p) D - m^2 / (2 E (E^2 - m^2))] (not symmetrized).
LinearOperator kg_closed_form(double m, const Grid& momentum);

// -m^2 / (2 E (E^2 - m^2)) with E = sqrt(p^2 + m^2).
double kg_mass_correction(double m, double p);

// diag(sqrt(E/p)): multiplies momentum amplitudes into energy-measure amplitudes.
LinearOperator kg_measure_operator(double m, const Grid& momentum);

// -i d/dE on an energy grid.
TimeOperatorBundle t_kg_energy_rep(const Grid& energy,
                                   DerivativeScheme scheme = DerivativeScheme::Spectral);

// H = alpha1 p + beta m.
LinearOperator dirac_hamiltonian(double m, const Grid& momentum, const DiracAlgebra& algebra);

// -alpha1 x - beta tau.
TimeOperatorBundle t_dirac(double m, const Grid& momentum, const DiracAlgebra& algebra);

// tau = m (p^-1 x + x p^-1) / 2 = -T_non.
TimeOperatorBundle proper_time(double m, const Grid& momentum);

// ||([H, T] - s i) psi|| / ||psi|| evaluated by operator application.
double conjugacy_residual(const LinearOperator& h, const LinearOperator& t, int sign,
                          const Eigen::VectorXcd& psi);

}  // namespace chronos
