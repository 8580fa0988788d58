#include "chronos/opalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Sparse>

namespace chronos {

namespace {

constexpr double kSparseFill = 0.1;

void require_same_shape(const LinearOperator& a, const LinearOperator& b, const char* what) {
  if (a.spin_dim() != b.spin_dim() || a.dim() != b.dim() || !same_lattice(a.grid(), b.grid())) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": operators live on different spaces");
  }
}

bool pure_multiplication(const std::optional<CanonicalSymbol>& s) {
  return s && s->conjugate_coeff == cplx{0.0, 0.0} && s->value;
}

ScalarFunction zero_function() {
  return [](double) { return cplx{0.0, 0.0}; };
}

std::optional<CanonicalSymbol> add_symbols(const std::optional<CanonicalSymbol>& a,
                                           const std::optional<CanonicalSymbol>& b, double sign) {
  if (!a || !b || !a->value || !b->value) return std::nullopt;
  CanonicalSymbol out;
  out.value = [fa = a->value, fb = b->value, sign](double q) { return fa(q) + sign * fb(q); };
  if (a->derivative && b->derivative) {
    out.derivative = [da = a->derivative, db = b->derivative, sign](double q) {
      return da(q) + sign * db(q);
    };
  }
  out.conjugate_coeff = a->conjugate_coeff + sign * b->conjugate_coeff;
  return out;
}

Eigen::MatrixXcd product(const LinearOperator& a, const LinearOperator& b) {
  if (a.is_diagonal()) return a.matrix().diagonal().asDiagonal() * b.matrix();
  if (b.is_diagonal()) return a.matrix() * b.matrix().diagonal().asDiagonal();
  if (a.fill() < kSparseFill) {
    const Eigen::SparseMatrix<cplx> sa = a.matrix().sparseView();
    return sa * b.matrix();
  }
  if (b.fill() < kSparseFill) {
    const Eigen::SparseMatrix<cplx> sb = b.matrix().sparseView();
    return a.matrix() * sb;
  }
  return a.matrix() * b.matrix();
}

}  // namespace

LinearOperator::LinearOperator(Grid grid, int spin_dim, Eigen::MatrixXcd matrix,
                               std::optional<CanonicalSymbol> symbol)
    : grid_(grid), spin_dim_(spin_dim), matrix_(std::move(matrix)), symbol_(std::move(symbol)) {
  if (spin_dim_ != 1 && spin_dim_ != 2) {
    throw Error(ErrorKind::InvalidArgument, "spin dimension must be 1 or 2");
  }
  const auto side = static_cast<Eigen::Index>(grid_.size()) * spin_dim_;
  if (matrix_.rows() != side || matrix_.cols() != side) {
    throw Error(ErrorKind::ShapeMismatch, "operator matrix side must equal n * spin_dim");
  }
  Eigen::Index nonzero = 0;
  bool diagonal = true;
  for (Eigen::Index c = 0; c < side; ++c) {
    for (Eigen::Index r = 0; r < side; ++r) {
      if (matrix_(r, c) != cplx{0.0, 0.0}) {
        ++nonzero;
        if (r != c) diagonal = false;
      }
    }
  }
  diagonal_ = diagonal;
  fill_ = static_cast<double>(nonzero) / static_cast<double>(side * side);
}

Eigen::VectorXcd LinearOperator::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dim()) {
    throw Error(ErrorKind::ShapeMismatch, "vector length does not match operator");
  }
  if (diagonal_) return matrix_.diagonal().cwiseProduct(v);
  return matrix_ * v;
}

LinearOperator LinearOperator::adjoint() const {
  return LinearOperator(grid_, spin_dim_, matrix_.adjoint());
}

LinearOperator& LinearOperator::operator*=(cplx s) {
  matrix_ *= s;
  if (symbol_) {
    if (symbol_->value) symbol_->value = [f = symbol_->value, s](double q) { return s * f(q); };
    if (symbol_->derivative) {
      symbol_->derivative = [f = symbol_->derivative, s](double q) { return s * f(q); };
    }
    symbol_->conjugate_coeff *= s;
  }
  if (s == cplx{0.0, 0.0}) {
    diagonal_ = true;
    fill_ = 0.0;
  }
  return *this;
}

LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
  require_same_shape(a, b, "sum");
  return LinearOperator(a.grid(), a.spin_dim(), a.matrix() + b.matrix(),
                        add_symbols(a.symbol(), b.symbol(), 1.0));
}

LinearOperator operator-(const LinearOperator& a, const LinearOperator& b) {
  require_same_shape(a, b, "difference");
  return LinearOperator(a.grid(), a.spin_dim(), a.matrix() - b.matrix(),
                        add_symbols(a.symbol(), b.symbol(), -1.0));
}

LinearOperator operator-(const LinearOperator& a) {
  LinearOperator out = a;
  out *= -1.0;
  return out;
}

LinearOperator operator*(cplx s, const LinearOperator& a) {
  LinearOperator out = a;
  out *= s;
  return out;
}

LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
  require_same_shape(a, b, "product");
  std::optional<CanonicalSymbol> sym;
  if (pure_multiplication(a.symbol()) && pure_multiplication(b.symbol())) {
    CanonicalSymbol s;
    s.value = [f = a.symbol()->value, g = b.symbol()->value](double q) { return f(q) * g(q); };
    if (a.symbol()->derivative && b.symbol()->derivative) {
      s.derivative = [f = a.symbol()->value, g = b.symbol()->value, df = a.symbol()->derivative,
                      dg = b.symbol()->derivative](double q) { return df(q) * g(q) + f(q) * dg(q); };
    }
    sym = std::move(s);
  }
  return LinearOperator(a.grid(), a.spin_dim(), product(a, b), std::move(sym));
}

StateVector apply(const LinearOperator& op, const StateVector& state) {
  if (op.spin_dim() != 1 || !same_lattice(op.grid(), state.grid())) {
    throw Error(ErrorKind::ShapeMismatch, "operator and state live on different spaces");
  }
  return StateVector(state.grid(), op.apply(state.amplitudes()));
}

SpinorState apply(const LinearOperator& op, const SpinorState& state) {
  if (op.spin_dim() != 2 || !same_lattice(op.grid(), state.grid())) {
    throw Error(ErrorKind::ShapeMismatch, "operator and spinor live on different spaces");
  }
  return SpinorState(state.grid(), Amplitudes(op.apply(state.amplitudes())));
}

cplx expectation(const LinearOperator& op, const StateVector& state) {
  const StateVector image = apply(op, state);
  return state.amplitudes().dot(image.amplitudes()) / state.amplitudes().squaredNorm();
}

cplx expectation(const LinearOperator& op, const SpinorState& state) {
  const SpinorState image = apply(op, state);
  return state.amplitudes().dot(image.amplitudes()) / state.amplitudes().squaredNorm();
}

LinearOperator identity_operator(const Grid& grid, int spin_dim) {
  const auto side = static_cast<Eigen::Index>(grid.size()) * spin_dim;
  std::optional<CanonicalSymbol> sym;
  if (spin_dim == 1) {
    sym = CanonicalSymbol{[](double) { return cplx{1.0, 0.0}; }, zero_function(), {}};
  }
  return LinearOperator(grid, spin_dim, Eigen::MatrixXcd::Identity(side, side), std::move(sym));
}

LinearOperator derivative_operator(const Grid& grid, DerivativeScheme scheme) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  if (scheme == DerivativeScheme::Spectral) {
    // Periodic sinc differentiation; cot kernel for even n, csc for odd n.
    const double scale = std::numbers::pi / grid.length();
    const bool even = n % 2 == 0;
    for (Eigen::Index j = 1; j < n; ++j) {
      for (Eigen::Index k = 0; k < j; ++k) {
        const auto diff = j - k;
        const double arg = std::numbers::pi * static_cast<double>(diff) / static_cast<double>(n);
        const double sign = diff % 2 == 0 ? 1.0 : -1.0;
        const double v = scale * sign * (even ? 1.0 / std::tan(arg) : 1.0 / std::sin(arg));
        d(j, k) = v;
        d(k, j) = -v;
      }
    }
  } else {
    if (n < 5) {
      throw Error(ErrorKind::InvalidArgument, "central-difference-4 needs at least 5 points");
    }
    const double h = grid.step();
    const double c1 = 8.0 / (12.0 * h), c2 = 1.0 / (12.0 * h);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j + 1 < n) { d(j, j + 1) = c1; d(j + 1, j) = -c1; }
      if (j + 2 < n) { d(j, j + 2) = -c2; d(j + 2, j) = c2; }
    }
  }
  return LinearOperator(grid, 1, d.cast<cplx>());
}

LinearOperator multiplication_operator(const Grid& grid, const ScalarFunction& f,
                                       const ScalarFunction& df) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXcd diag(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double q = grid.point(static_cast<std::size_t>(k));
    const cplx v = f(q);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorKind::InvalidArgument,
                  "multiplier is not finite at grid point " + std::to_string(q));
    }
    diag[k] = v;
  }
  return LinearOperator(grid, 1, diag.asDiagonal().toDenseMatrix(), CanonicalSymbol{f, df, {}});
}

LinearOperator conjugate_coordinate(const Grid& grid, DerivativeScheme scheme) {
  cplx factor;
  switch (grid.rep()) {
    case Representation::Momentum: factor = {0.0, 1.0}; break;
    case Representation::Position: factor = {0.0, -1.0}; break;
    default:
      throw Error(ErrorKind::GridMismatch, "conjugate coordinate needs a position or momentum grid");
  }
  LinearOperator d = derivative_operator(grid, scheme);
  return LinearOperator(grid, 1, factor * d.matrix(),
                        CanonicalSymbol{zero_function(), zero_function(), {1.0, 0.0}});
}

LinearOperator inverse_momentum(const Grid& momentum) {
  if (momentum.rep() != Representation::Momentum) {
    throw Error(ErrorKind::GridMismatch, "inverse momentum needs a momentum grid");
  }
  if (momentum.has_near_zero_point()) {
    throw Error(ErrorKind::ZeroMomentum, "grid has a point within step/2 of p = 0");
  }
  return multiplication_operator(
      momentum, [](double p) { return cplx{1.0 / p, 0.0}; },
      [](double p) { return cplx{-1.0 / (p * p), 0.0}; });
}

LinearOperator with_spin(const Eigen::Matrix2cd& spin, const LinearOperator& op) {
  if (op.spin_dim() != 1) {
    throw Error(ErrorKind::ShapeMismatch, "with_spin expects a scalar operator");
  }
  const auto n = op.dim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int s = 0; s < 2; ++s) {
    for (int t = 0; t < 2; ++t) {
      if (spin(s, t) != cplx{0.0, 0.0}) out.block(s * n, t * n, n, n) = spin(s, t) * op.matrix();
    }
  }
  return LinearOperator(op.grid(), 2, std::move(out));
}

LinearOperator commutator(const LinearOperator& a, const LinearOperator& b) {
  require_same_shape(a, b, "commutator");
  return LinearOperator(a.grid(), a.spin_dim(), product(a, b) - product(b, a));
}

LinearOperator canonical_commutator(const LinearOperator& a, const LinearOperator& b) {
  require_same_shape(a, b, "canonical commutator");
  if (!a.symbol() || !b.symbol()) {
    throw Error(ErrorKind::InvalidArgument, "canonical commutator needs closed-form operands");
  }
  cplx kappa;
  switch (a.rep()) {
    case Representation::Momentum: kappa = {0.0, 1.0}; break;
    case Representation::Position: kappa = {0.0, -1.0}; break;
    default:
      throw Error(ErrorKind::GridMismatch, "canonical commutator needs a position or momentum grid");
  }
  const CanonicalSymbol& sa = *a.symbol();
  const CanonicalSymbol& sb = *b.symbol();
  // [f + aQ, g + bQ] = a kappa g' - b kappa f'
  const cplx ca = sa.conjugate_coeff, cb = sb.conjugate_coeff;
  if ((ca != cplx{} && !sb.derivative) || (cb != cplx{} && !sa.derivative)) {
    throw Error(ErrorKind::InvalidArgument, "canonical commutator needs the multiplier derivative");
  }
  ScalarFunction dg = sb.derivative ? sb.derivative : zero_function();
  ScalarFunction df = sa.derivative ? sa.derivative : zero_function();
  ScalarFunction h = [ca, cb, kappa, dg, df](double q) {
    cplx v{0.0, 0.0};
    if (ca != cplx{}) v += ca * kappa * dg(q);
    if (cb != cplx{}) v -= cb * kappa * df(q);
    return v;
  };
  return multiplication_operator(a.grid(), h);
}

LinearOperator symmetrize(const LinearOperator& a, const LinearOperator& b) {
  require_same_shape(a, b, "symmetrize");
  return LinearOperator(a.grid(), a.spin_dim(), 0.5 * (product(a, b) + product(b, a)));
}

double hermiticity_defect(const LinearOperator& a) {
  const double num = (a.matrix() - a.matrix().adjoint()).norm();
  return num / std::max(1.0, a.matrix().norm());
}

double entrywise_distance(const LinearOperator& a, const LinearOperator& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::ShapeMismatch, "entrywise distance of different shapes");
  }
  const double diff = (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
  return diff / std::max(1.0, a.matrix().cwiseAbs().maxCoeff());
}

double relative_residual(const Eigen::VectorXcd& got, const Eigen::VectorXcd& want) {
  if (got.size() != want.size()) {
    throw Error(ErrorKind::ShapeMismatch, "residual of vectors with different lengths");
  }
  const double scale = want.norm();
  const double diff = (got - want).norm();
  return scale > 0.0 ? diff / scale : diff;
}

}  // namespace chronos
