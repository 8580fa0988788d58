#pragma once

// Energy lattices for the shift of the zero-energy reference point: the
// full-line space, exact lattice translations V(e), the generator S = i d/dE,
// its half-line restriction and the transition amplitudes between shifted
// eigenstates.

#include <vector>

#include "chronos/lattice.hpp"
#include "chronos/opalg.hpp"
#include "chronos/time_construct.hpp"

namespace chronos {

// full: k * dE for k in [-M, M]; half: k * dE for k in [0, M].
struct EnergyLatticePair {
  Grid full;
  Grid half;
  double delta_e;
  int m_max;

  // Index of E = 0 inside `full`.
  Eigen::Index zero_index() const noexcept { return m_max; }
};

EnergyLatticePair make_energy_lattice(int m_max, double delta_e);

struct ShiftReport {
  int j = 0;
  double input_norm = 0.0;
  double output_norm = 0.0;
  // Mass pushed below E = 0 (half-line shifts only).
  double defect = 0.0;
  // Mass pushed past the top of the finite lattice.
  double edge_loss = 0.0;
};

struct ShiftResult {
  StateVector state;
  ShiftReport report;
};

enum class StateClass { Physical, Unphysical };

// diag(E_k) on any energy grid.
LinearOperator hamiltonian_h0(const Grid& energy);

// H(e) = H(0) + e.
LinearOperator hamiltonian_at(const Grid& energy, double e);

// S = +i D on the full lattice.
LinearOperator shift_generator_full(const EnergyLatticePair& lattice,
                                    DerivativeScheme scheme = DerivativeScheme::Spectral);

// output_k = input_{k - j}. Mass that leaves the lattice is reported as edge_loss.
ShiftResult v_shift_full(const StateVector& state, int j, const EnergyLatticePair& lattice);

StateVector embed(const StateVector& half_state, const EnergyLatticePair& lattice);
StateVector restrict_to_half(const StateVector& full_state, const EnergyLatticePair& lattice);

// restrict . v_shift_full . embed, with the E < 0 mass reported as defect.
ShiftResult restricted_shift(const StateVector& half_state, int j, const EnergyLatticePair& lattice);

// T = P S P on the half lattice.
TimeOperatorBundle restricted_generator(const EnergyLatticePair& lattice,
                                        DerivativeScheme scheme = DerivativeScheme::Spectral);

// <E', 0 | E, e> over the half lattice for E = e_idx * dE and e = j * dE:
// a Kronecker delta at E' = E + e when E + e >= 0, all zeros otherwise.
std::vector<cplx> transition_amplitude(int e_idx, int j, const EnergyLatticePair& lattice);

// Lattice index of a shift e; OffLattice unless e is an integer multiple of dE.
int shift_index(double e, const EnergyLatticePair& lattice);

StateClass classify_state(int e_idx, int j, const EnergyLatticePair& lattice);

// <a|H(e)|b> and <V a|H(0)|V b>, with V the shift by j, on the full lattice.
struct PictureElements {
  cplx shifted_hamiltonian;
  cplx shifted_states;
};
PictureElements picture_elements(const StateVector& a, const StateVector& b, int j,
                                 const EnergyLatticePair& lattice);

// Derivative in e of V(e)^dagger F V(e) for F = diag(E), taken as a central
// difference over one lattice step and applied to `state`, against i [F, S] state.
double heisenberg_like_residual(const StateVector& state, const EnergyLatticePair& lattice,
                                DerivativeScheme scheme = DerivativeScheme::Spectral);

// Central difference -i (V(+1) - V(-1)) state / (2 dE) against S V(0) state.
// The mismatch scales as dE^2 for smooth states.
double schroedinger_like_residual(const StateVector& state, const EnergyLatticePair& lattice,
                                  DerivativeScheme scheme = DerivativeScheme::Spectral);

}  // namespace chronos
