#pragma once

// Uniform 1-D grids, states living on them, and the maps between the
// position, momentum and energy representations. Natural units (hbar = c = 1).

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "chronos/error.hpp"

namespace chronos {

using cplx = std::complex<double>;
using Amplitudes = Eigen::VectorXcd;

enum class Representation { Position, Momentum, EnergyHalfLine, EnergyFullLine };

std::string_view to_string(Representation rep) noexcept;

class Grid {
 public:
  std::size_t size() const noexcept { return n_; }
  double origin() const noexcept { return origin_; }
  double step() const noexcept { return step_; }
  Representation rep() const noexcept { return rep_; }

  double point(std::size_t k) const noexcept {
    return origin_ + static_cast<double>(k) * step_;
  }
  double front() const noexcept { return origin_; }
  double back() const noexcept { return point(n_ - 1); }
  double length() const noexcept { return static_cast<double>(n_) * step_; }
  std::vector<double> points() const;

  // True when some point lies within step/2 of zero.
  bool has_near_zero_point() const noexcept;

  bool operator==(const Grid&) const = default;

 private:
  Grid(std::size_t n, double origin, double step, Representation rep)
      : n_(n), origin_(origin), step_(step), rep_(rep) {}
  friend Grid make_grid(std::size_t, double, double, Representation);

  std::size_t n_;
  double origin_;
  double step_;
  Representation rep_;
};

Grid make_grid(std::size_t n, double origin, double step, Representation rep);

// Momentum grid with points (k + 1/2 - n/2) * step; p = 0 is never a point.
// For odd n the points are shifted up by step/2 to keep that property.
Grid offset_momentum_grid(std::size_t n, double step);

// Position grid centred on zero, points (k - n/2) * step.
Grid centered_position_grid(std::size_t n, double step);

// Momentum grid that is Fourier dual to `position` (step 2 pi / (n dx)),
// half-integer offset.
Grid fourier_dual(const Grid& position);

// Same size and representation, origin and step equal to 1e-12 relative.
bool same_lattice(const Grid& a, const Grid& b) noexcept;

// Scalar amplitudes on a grid. The norm carries the grid step as quadrature
// weight: norm^2 = sum |psi_k|^2 * step.
class StateVector {
 public:
  StateVector(Grid grid, Amplitudes amplitudes);

  const Grid& grid() const noexcept { return grid_; }
  const Amplitudes& amplitudes() const noexcept { return amps_; }
  cplx operator[](std::size_t k) const { return amps_[static_cast<Eigen::Index>(k)]; }

  double norm_squared() const noexcept;
  double norm() const noexcept;
  StateVector normalized() const;

  // <this|other> with the grid step as weight.
  cplx inner(const StateVector& other) const;

 private:
  Grid grid_;
  Amplitudes amps_;
};

// Two-component amplitudes on a momentum grid. Storage is spin-major:
// the upper component occupies [0, n), the lower one [n, 2n).
class SpinorState {
 public:
  SpinorState(Grid grid, Amplitudes upper, Amplitudes lower);
  SpinorState(Grid grid, Amplitudes stacked);

  const Grid& grid() const noexcept { return grid_; }
  const Amplitudes& amplitudes() const noexcept { return amps_; }
  Amplitudes upper() const;
  Amplitudes lower() const;

  double norm_squared() const noexcept;
  double norm() const noexcept;
  SpinorState normalized() const;
  cplx inner(const SpinorState& other) const;

 private:
  Grid grid_;
  Amplitudes amps_;
};

// Normalized packet exp(-(p - p0)^2 / (4 sigma_p^2)) exp(-i p x0) on a
// momentum grid. The packet must stay at least 5 sigma_p away from the grid
// edges and from p = 0; mass outside that window above 1e-12 is rejected.
StateVector gaussian_state(const Grid& momentum, double p0, double sigma_p, double x0);

// Mass (norm^2 share) of a normalized state lying outside the interior window
// of `state`'s momentum grid for the given margin.
double mass_outside_interior(const StateVector& state, double margin);

// Unitary discrete Fourier transform between Fourier-dual grids
// (dp * dx * n = 2 pi). Arbitrary grid origins are allowed.
StateVector position_to_momentum(const StateVector& state, const Grid& momentum);
StateVector momentum_to_position(const StateVector& state, const Grid& position);

// [E^2 / (E^2 - m^2)]^(1/4); equals sqrt(dp/dE) on the mass shell.
double kg_measure_factor(double energy, double m);

// Change of variable p -> E = sqrt(p^2 + m^2) for right-moving states
// (all grid momenta > 0). Amplitudes are resampled with cubic Lagrange
// interpolation onto `energy` and multiplied by kg_measure_factor, which
// keeps sum |phi|^2 dE = sum |psi|^2 dp. Samples whose momentum falls outside
// the source grid are set to zero.
StateVector momentum_to_energy(const StateVector& state, double m, const Grid& energy);
StateVector energy_to_momentum(const StateVector& state, double m, const Grid& momentum);

// Ten (or `count`) normalized Gaussian packets in the positive-momentum
// interior of a momentum grid, spread in centre, width and position offset.
std::vector<StateVector> interior_gaussian_suite(const Grid& momentum, std::size_t count = 10);

}  // namespace chronos
