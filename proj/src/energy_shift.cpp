#include "chronos/energy_shift.hpp"

#include <cmath>
#include <string>

namespace chronos {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_grid(const StateVector& s, const Grid& g, const char* what) {
  if (!same_lattice(s.grid(), g)) {
    throw Error(ErrorKind::GridMismatch, std::string("state is not on the ") + what + " lattice");
  }
}

void require_shift(int j, const EnergyLatticePair& lattice) {
  if (j < -lattice.m_max || j > lattice.m_max) {
    throw Error(ErrorKind::OutOfRange,
                "shift " + std::to_string(j) + " exceeds lattice half-width " +
                    std::to_string(lattice.m_max));
  }
}

double weighted_mass(const Amplitudes& a, Eigen::Index begin, Eigen::Index count, double step) {
  double s = 0.0;
  for (Eigen::Index k = begin; k < begin + count; ++k) s += std::norm(a[k]);
  return s * step;
}

}  // namespace

EnergyLatticePair make_energy_lattice(int m_max, double delta_e) {
  if (m_max < 1) throw Error(ErrorKind::InvalidArgument, "lattice half-width must be >= 1");
  if (!(delta_e > 0.0) || !std::isfinite(delta_e)) {
    throw Error(ErrorKind::InvalidArgument, "energy step must be positive");
  }
  const auto m = static_cast<std::size_t>(m_max);
  return {make_grid(2 * m + 1, -static_cast<double>(m_max) * delta_e, delta_e,
                    Representation::EnergyFullLine),
          make_grid(m + 1, 0.0, delta_e, Representation::EnergyHalfLine), delta_e, m_max};
}

LinearOperator hamiltonian_h0(const Grid& energy) {
  if (energy.rep() != Representation::EnergyHalfLine &&
      energy.rep() != Representation::EnergyFullLine) {
    throw Error(ErrorKind::GridMismatch, "expected an energy grid");
  }
  return multiplication_operator(
      energy, [](double e) { return cplx{e, 0.0}; }, [](double) { return cplx{1.0, 0.0}; });
}

LinearOperator hamiltonian_at(const Grid& energy, double e) {
  return hamiltonian_h0(energy) + cplx{e, 0.0} * identity_operator(energy);
}

LinearOperator shift_generator_full(const EnergyLatticePair& lattice, DerivativeScheme scheme) {
  LinearOperator s = derivative_operator(lattice.full, scheme);
  s *= kI;
  return s;
}

ShiftResult v_shift_full(const StateVector& state, int j, const EnergyLatticePair& lattice) {
  require_grid(state, lattice.full, "full");
  require_shift(j, lattice);
  const Amplitudes& in = state.amplitudes();
  const Eigen::Index n = in.size();
  const double step = lattice.delta_e;
  Amplitudes out = Amplitudes::Zero(n);
  ShiftReport rep;
  rep.j = j;
  if (j >= 0) {
    out.segment(j, n - j) = in.segment(0, n - j);
    rep.edge_loss = weighted_mass(in, n - j, j, step);
  } else {
    out.segment(0, n + j) = in.segment(-j, n + j);
    rep.edge_loss = weighted_mass(in, 0, -j, step);
  }
  StateVector result(lattice.full, std::move(out));
  rep.input_norm = state.norm();
  rep.output_norm = result.norm();
  return {std::move(result), rep};
}

StateVector embed(const StateVector& half_state, const EnergyLatticePair& lattice) {
  require_grid(half_state, lattice.half, "half");
  Amplitudes out = Amplitudes::Zero(static_cast<Eigen::Index>(lattice.full.size()));
  out.tail(lattice.m_max + 1) = half_state.amplitudes();
  return StateVector(lattice.full, std::move(out));
}

StateVector restrict_to_half(const StateVector& full_state, const EnergyLatticePair& lattice) {
  require_grid(full_state, lattice.full, "full");
  return StateVector(lattice.half, full_state.amplitudes().tail(lattice.m_max + 1));
}

ShiftResult restricted_shift(const StateVector& half_state, int j,
                             const EnergyLatticePair& lattice) {
  require_grid(half_state, lattice.half, "half");
  require_shift(j, lattice);
  const ShiftResult full = v_shift_full(embed(half_state, lattice), j, lattice);
  StateVector out = restrict_to_half(full.state, lattice);

  const Amplitudes& in = half_state.amplitudes();
  const Eigen::Index n = in.size();
  const double step = lattice.delta_e;
  ShiftReport rep;
  rep.j = j;
  rep.input_norm = half_state.norm();
  rep.output_norm = out.norm();
  if (j >= 0) {
    rep.edge_loss = weighted_mass(in, n - j, j, step);
  } else {
    rep.defect = weighted_mass(in, 0, -j, step);
  }
  return {std::move(out), rep};
}

TimeOperatorBundle restricted_generator(const EnergyLatticePair& lattice, DerivativeScheme scheme) {
  const LinearOperator s = shift_generator_full(lattice, scheme);
  const Eigen::Index h = lattice.m_max + 1;
  const Eigen::Index z = lattice.zero_index();
  LinearOperator t(lattice.half, 1, s.matrix().block(z, z, h, h));
  return {std::move(t), TimeKind::RestrictionT, expected_commutator_sign(TimeKind::RestrictionT),
          std::nullopt};
}

std::vector<cplx> transition_amplitude(int e_idx, int j, const EnergyLatticePair& lattice) {
  if (e_idx < 0 || e_idx > lattice.m_max) {
    throw Error(ErrorKind::OutOfRange, "energy index outside the half lattice");
  }
  require_shift(j, lattice);
  if (e_idx + j > lattice.m_max) {
    throw Error(ErrorKind::OutOfRange, "shifted energy lies above the lattice top");
  }
  Amplitudes basis = Amplitudes::Zero(lattice.m_max + 1);
  basis[e_idx] = 1.0;
  const ShiftResult r = restricted_shift(StateVector(lattice.half, std::move(basis)), j, lattice);
  const Amplitudes& a = r.state.amplitudes();
  return std::vector<cplx>(a.data(), a.data() + a.size());
}

int shift_index(double e, const EnergyLatticePair& lattice) {
  const double q = e / lattice.delta_e;
  const double r = std::round(q);
  if (!std::isfinite(q) || std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
    throw Error(ErrorKind::OffLattice, "shift is not a multiple of the energy step");
  }
  return static_cast<int>(r);
}

StateClass classify_state(int e_idx, int j, const EnergyLatticePair& lattice) {
  if (e_idx < 0 || e_idx > lattice.m_max) {
    throw Error(ErrorKind::OutOfRange, "energy index outside the half lattice");
  }
  return e_idx + j >= 0 ? StateClass::Physical : StateClass::Unphysical;
}

PictureElements picture_elements(const StateVector& a, const StateVector& b, int j,
                                 const EnergyLatticePair& lattice) {
  require_grid(a, lattice.full, "full");
  require_grid(b, lattice.full, "full");
  const double e = j * lattice.delta_e;
  const LinearOperator he = hamiltonian_at(lattice.full, e);
  const LinearOperator h0 = hamiltonian_h0(lattice.full);
  const StateVector va = v_shift_full(a, j, lattice).state;
  const StateVector vb = v_shift_full(b, j, lattice).state;
  return {a.inner(apply(he, b)), va.inner(apply(h0, vb))};
}

double heisenberg_like_residual(const StateVector& state, const EnergyLatticePair& lattice,
                                DerivativeScheme scheme) {
  require_grid(state, lattice.full, "full");
  const LinearOperator f = hamiltonian_h0(lattice.full);
  // V(e)^dagger F V(e) psi: shift by +j, apply F, shift back.
  auto conjugated = [&](int j) {
    const StateVector up = v_shift_full(state, j, lattice).state;
    return v_shift_full(apply(f, up), -j, lattice).state.amplitudes();
  };
  const Amplitudes lhs = (conjugated(1) - conjugated(-1)) / (2.0 * lattice.delta_e);
  const LinearOperator s = shift_generator_full(lattice, scheme);
  const Amplitudes rhs = kI * commutator(f, s).apply(state.amplitudes());
  return relative_residual(lhs, rhs);
}

double schroedinger_like_residual(const StateVector& state, const EnergyLatticePair& lattice,
                                  DerivativeScheme scheme) {
  require_grid(state, lattice.full, "full");
  const Amplitudes up = v_shift_full(state, 1, lattice).state.amplitudes();
  const Amplitudes down = v_shift_full(state, -1, lattice).state.amplitudes();
  const Amplitudes lhs = -kI * (up - down) / (2.0 * lattice.delta_e);
  const Amplitudes rhs = shift_generator_full(lattice, scheme).apply(state.amplitudes());
  return relative_residual(lhs, rhs);
}

}  // namespace chronos
