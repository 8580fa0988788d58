#pragma once

// Dense operator algebra on grids: differentiation and multiplication
// matrices, products, commutators, symmetrized products and adjoints.

#include <complex>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "chronos/lattice.hpp"

namespace chronos {

enum class DerivativeScheme { Spectral, CentralDifference4 };

// How a commutator entering a construction is evaluated: as a matrix, or from
// closed forms through the canonical rule [Q, f(q)] = kappa f'(q).
enum class CommutatorRoute { Matrix, Canonical };

using ScalarFunction = std::function<cplx(double)>;

// Closed form of an operator built from the canonical pair of a grid:
//   diag(value(q)) + conjugate_coeff * Q
// where q is the grid coordinate and Q its conjugate (x = i d/dp on momentum
// grids, p = -i d/dx on position grids). `derivative` is value'(q) when known.
struct CanonicalSymbol {
  ScalarFunction value;
  ScalarFunction derivative;
  cplx conjugate_coeff{0.0, 0.0};
};

class LinearOperator {
 public:
  LinearOperator(Grid grid, int spin_dim, Eigen::MatrixXcd matrix,
                 std::optional<CanonicalSymbol> symbol = std::nullopt);

  const Grid& grid() const noexcept { return grid_; }
  Representation rep() const noexcept { return grid_.rep(); }
  int spin_dim() const noexcept { return spin_dim_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  const std::optional<CanonicalSymbol>& symbol() const noexcept { return symbol_; }

  bool is_diagonal() const noexcept { return diagonal_; }
  // Fraction of non-zero entries.
  double fill() const noexcept { return fill_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  LinearOperator adjoint() const;

  LinearOperator& operator*=(cplx s);

 private:
  Grid grid_;
  int spin_dim_;
  Eigen::MatrixXcd matrix_;
  std::optional<CanonicalSymbol> symbol_;
  bool diagonal_ = false;
  double fill_ = 1.0;
};

// Sum, difference, scaling and product. Shapes (grid, spin) must agree.
// Closed forms survive addition and scaling; products keep them only for two
// purely multiplicative operands.
LinearOperator operator+(const LinearOperator& a, const LinearOperator& b);
LinearOperator operator-(const LinearOperator& a, const LinearOperator& b);
LinearOperator operator-(const LinearOperator& a);
LinearOperator operator*(cplx s, const LinearOperator& a);
LinearOperator operator*(const LinearOperator& a, const LinearOperator& b);

StateVector apply(const LinearOperator& op, const StateVector& state);
SpinorState apply(const LinearOperator& op, const SpinorState& state);

// <psi|op|psi> / <psi|psi>
cplx expectation(const LinearOperator& op, const StateVector& state);
cplx expectation(const LinearOperator& op, const SpinorState& state);

LinearOperator identity_operator(const Grid& grid, int spin_dim = 1);

// d/dq on the grid. Spectral treats the grid as periodic (exact for
// band-limited samples); CentralDifference4 uses the 5-point stencil,
// truncated at the edges so the matrix stays exactly antisymmetric.
LinearOperator derivative_operator(const Grid& grid, DerivativeScheme scheme);

// diag(f(q_k)). `df`, when given, is recorded for canonical commutators.
LinearOperator multiplication_operator(const Grid& grid, const ScalarFunction& f,
                                       const ScalarFunction& df = {});

// x = i d/dp on momentum grids, p = -i d/dx on position grids.
LinearOperator conjugate_coordinate(const Grid& grid,
                                    DerivativeScheme scheme = DerivativeScheme::Spectral);

// diag(1/p_k); rejects grids with a point within step/2 of p = 0.
LinearOperator inverse_momentum(const Grid& momentum);

// kron(spin, op) in the spin-major layout used by SpinorState.
LinearOperator with_spin(const Eigen::Matrix2cd& spin, const LinearOperator& op);

// AB - BA as a matrix.
LinearOperator commutator(const LinearOperator& a, const LinearOperator& b);

// [A, B] from the closed forms, using [Q, f(q)] = kappa f'(q) with
// kappa = i on momentum grids and -i on position grids. Result is diagonal.
// Both operands must carry a CanonicalSymbol with the needed derivatives.
LinearOperator canonical_commutator(const LinearOperator& a, const LinearOperator& b);

// (AB + BA) / 2
LinearOperator symmetrize(const LinearOperator& a, const LinearOperator& b);

// ||A - A^dagger||_F / max(1, ||A||_F)
double hermiticity_defect(const LinearOperator& a);

// max |A_jk - B_jk| / max(1, max |A_jk|)
double entrywise_distance(const LinearOperator& a, const LinearOperator& b);

// ||got - want|| / ||want||, or ||got|| when want is zero.
double relative_residual(const Eigen::VectorXcd& got, const Eigen::VectorXcd& want);

}  // namespace chronos
