#include "chronos/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

namespace chronos {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::GridMismatch: return "grid-mismatch";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::SupportViolation: return "support-violation";
    case ErrorKind::ZeroMomentum: return "zero-momentum";
    case ErrorKind::SingularCommutator: return "singular-commutator";
    case ErrorKind::PreconditionViolated: return "precondition-violated";
    case ErrorKind::ZeroDrift: return "zero-drift";
    case ErrorKind::NonHermitian: return "non-hermitian";
    case ErrorKind::Unnormalized: return "unnormalized";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::OffLattice: return "off-lattice";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what, std::optional<double> residual)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind),
      residual_(residual) {}

std::string_view to_string(Representation rep) noexcept {
  switch (rep) {
    case Representation::Position: return "position";
    case Representation::Momentum: return "momentum";
    case Representation::EnergyHalfLine: return "energy-half-line";
    case Representation::EnergyFullLine: return "energy-full-line";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Grid

std::vector<double> Grid::points() const {
  std::vector<double> out(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k] = point(k);
  return out;
}

bool Grid::has_near_zero_point() const noexcept {
  // Nearest index to zero, then check its neighbours.
  const double idx = -origin_ / step_;
  const double lo = std::floor(idx);
  for (double k : {lo, lo + 1.0}) {
    if (k < 0.0 || k > static_cast<double>(n_ - 1)) continue;
    if (std::abs(origin_ + k * step_) < 0.5 * step_ * (1.0 - 1e-12)) return true;
  }
  return false;
}

Grid make_grid(std::size_t n, double origin, double step, Representation rep) {
  if (n < 2) {
    throw Error(ErrorKind::InvalidArgument, "grid needs at least 2 points, got " + std::to_string(n));
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorKind::InvalidArgument, "grid step must be positive and finite");
  }
  if (!std::isfinite(origin)) {
    throw Error(ErrorKind::InvalidArgument, "grid origin must be finite");
  }
  if (rep == Representation::EnergyHalfLine && origin != 0.0) {
    throw Error(ErrorKind::InvalidArgument, "half-line energy grid must start at E = 0");
  }
  return Grid(n, origin, step, rep);
}

Grid offset_momentum_grid(std::size_t n, double step) {
  double origin = (0.5 - 0.5 * static_cast<double>(n)) * step;
  // odd n would put a point on p = 0; move up half a step instead
  if (n % 2 == 1) origin += 0.5 * step;
  return make_grid(n, origin, step, Representation::Momentum);
}

Grid centered_position_grid(std::size_t n, double step) {
  const double origin = -0.5 * static_cast<double>(n) * step;
  return make_grid(n, origin, step, Representation::Position);
}

Grid fourier_dual(const Grid& position) {
  if (position.rep() != Representation::Position) {
    throw Error(ErrorKind::GridMismatch, "fourier_dual expects a position grid");
  }
  const double dp = 2.0 * std::numbers::pi / position.length();
  return offset_momentum_grid(position.size(), dp);
}

namespace {

bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

bool same_lattice(const Grid& a, const Grid& b) noexcept {
  return a.size() == b.size() && a.rep() == b.rep() &&
         close_rel(a.step(), b.step(), 1e-12) &&
         std::abs(a.origin() - b.origin()) <= 1e-12 * std::max(1.0, a.step());
}

// ---------------------------------------------------------------------------
// States

StateVector::StateVector(Grid grid, Amplitudes amplitudes)
    : grid_(grid), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != grid_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "state has " + std::to_string(amps_.size()) +
                                              " amplitudes on a grid of " +
                                              std::to_string(grid_.size()));
  }
}

double StateVector::norm_squared() const noexcept {
  return amps_.squaredNorm() * grid_.step();
}

double StateVector::norm() const noexcept { return std::sqrt(norm_squared()); }

StateVector StateVector::normalized() const {
  const double nrm = norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw Error(ErrorKind::Unnormalized, "cannot normalize a zero or non-finite state");
  }
  return StateVector(grid_, amps_ / nrm);
}

cplx StateVector::inner(const StateVector& other) const {
  if (!same_lattice(grid_, other.grid_)) {
    throw Error(ErrorKind::GridMismatch, "inner product across different grids");
  }
  return amps_.dot(other.amps_) * grid_.step();
}

SpinorState::SpinorState(Grid grid, Amplitudes upper, Amplitudes lower) : grid_(grid) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (upper.size() != n || lower.size() != n) {
    throw Error(ErrorKind::ShapeMismatch, "spinor components must match the grid size");
  }
  if (grid_.rep() != Representation::Momentum) {
    throw Error(ErrorKind::GridMismatch, "spinor states live on momentum grids");
  }
  amps_.resize(2 * n);
  amps_.head(n) = upper;
  amps_.tail(n) = lower;
}

SpinorState::SpinorState(Grid grid, Amplitudes stacked) : grid_(grid), amps_(std::move(stacked)) {
  if (static_cast<std::size_t>(amps_.size()) != 2 * grid_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "stacked spinor must have 2n amplitudes");
  }
  if (grid_.rep() != Representation::Momentum) {
    throw Error(ErrorKind::GridMismatch, "spinor states live on momentum grids");
  }
}

Amplitudes SpinorState::upper() const { return amps_.head(static_cast<Eigen::Index>(grid_.size())); }
Amplitudes SpinorState::lower() const { return amps_.tail(static_cast<Eigen::Index>(grid_.size())); }

double SpinorState::norm_squared() const noexcept { return amps_.squaredNorm() * grid_.step(); }
double SpinorState::norm() const noexcept { return std::sqrt(norm_squared()); }

SpinorState SpinorState::normalized() const {
  const double nrm = norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) {
    throw Error(ErrorKind::Unnormalized, "cannot normalize a zero or non-finite spinor");
  }
  return SpinorState(grid_, Amplitudes(amps_ / nrm));
}

cplx SpinorState::inner(const SpinorState& other) const {
  if (!same_lattice(grid_, other.grid_)) {
    throw Error(ErrorKind::GridMismatch, "inner product across different grids");
  }
  return amps_.dot(other.amps_) * grid_.step();
}

// ---------------------------------------------------------------------------
// Gaussian packets

namespace {

bool in_interior(const Grid& g, double p, double margin) {
  return p - g.front() >= margin && g.back() - p >= margin && std::abs(p) >= margin;
}

}  // namespace

double mass_outside_interior(const StateVector& state, double margin) {
  const Grid& g = state.grid();
  double outside = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!in_interior(g, g.point(k), margin)) outside += std::norm(state[k]);
  }
  return outside * g.step() / state.norm_squared();
}

StateVector gaussian_state(const Grid& momentum, double p0, double sigma_p, double x0) {
  if (momentum.rep() != Representation::Momentum) {
    throw Error(ErrorKind::GridMismatch, "gaussian_state expects a momentum grid");
  }
  if (!(sigma_p > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "sigma_p must be positive");
  }
  Amplitudes amps(static_cast<Eigen::Index>(momentum.size()));
  for (std::size_t k = 0; k < momentum.size(); ++k) {
    const double p = momentum.point(k);
    const double dp = p - p0;
    const double envelope = std::exp(-dp * dp / (4.0 * sigma_p * sigma_p));
    amps[static_cast<Eigen::Index>(k)] = envelope * std::polar(1.0, -p * x0);
  }
  StateVector state(momentum, std::move(amps));
  if (!(state.norm() > 0.0)) {
    throw Error(ErrorKind::SupportViolation, "packet has no mass on the grid");
  }
  state = state.normalized();
  const double outside = mass_outside_interior(state, 5.0 * sigma_p);
  if (outside > 1e-12) {
    std::ostringstream msg;
    msg << "packet (p0=" << p0 << ", sigma_p=" << sigma_p << ") leaves " << outside
        << " of its mass within 5 sigma of the grid edges or p = 0";
    throw Error(ErrorKind::SupportViolation, msg.str(), outside);
  }
  return state;
}

std::vector<StateVector> interior_gaussian_suite(const Grid& momentum, std::size_t count) {
  if (momentum.rep() != Representation::Momentum) {
    throw Error(ErrorKind::GridMismatch, "interior_gaussian_suite expects a momentum grid");
  }
  const double lo = std::max(momentum.front(), 0.0);
  const double hi = momentum.back();
  const double width = hi - lo;
  const double band = std::numbers::pi / momentum.step();  // |x| reachable by the grid
  constexpr std::array<double, 5> kWidthFraction{0.010, 0.016, 0.020, 0.024, 0.030};

  std::vector<StateVector> suite;
  suite.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.5;
    const double p0 = lo + width * (0.3 + 0.4 * u);
    // 13 sigma of clearance keeps the 5 sigma exclusion band below 1e-12 of the mass
    const double clearance = std::min(p0 - lo, hi - p0) / 13.0;
    const double sigma =
        std::min(std::max(kWidthFraction[i % kWidthFraction.size()] * width, 9.0 / band), clearance);
    // alternate sign of the position offset, magnitude up to 0.15 of the band
    const double x0 = (i % 2 == 0 ? -1.0 : 1.0) * 0.15 * band * (0.2 + 0.8 * u);
    suite.push_back(gaussian_state(momentum, p0, sigma, x0));
  }
  return suite;
}

// ---------------------------------------------------------------------------
// Fourier transform between dual grids

namespace {

// FFTW's planner is not reentrant.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void require_dual(const Grid& position, const Grid& momentum) {
  if (position.rep() != Representation::Position || momentum.rep() != Representation::Momentum) {
    throw Error(ErrorKind::GridMismatch, "expected a (position, momentum) grid pair");
  }
  if (position.size() != momentum.size()) {
    throw Error(ErrorKind::GridMismatch, "dual grids must have the same number of points");
  }
  const double product = position.step() * momentum.step() * static_cast<double>(position.size());
  if (std::abs(product - 2.0 * std::numbers::pi) > 1e-12 * 2.0 * std::numbers::pi) {
    throw Error(ErrorKind::GridMismatch, "grids are not Fourier dual (dx * dp * n != 2 pi)");
  }
}

// out_j = sum_k in_k exp(sign * 2 pi i j k / n), unnormalized.
Amplitudes dft(const Amplitudes& in, int sign) {
  const int n = static_cast<int>(in.size());
  Amplitudes out(in.size());
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_mutex());
    plan = fftw_plan_dft_1d(n, src, dst, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

// psi~(p_j) = dx / sqrt(2 pi) * sum_k psi(x_k) exp(-i p_j x_k). Writing
// p_j x_k = p0 x0 + j dp x0 + k p0 dx + 2 pi j k / n splits the sum into a
// pre-twist, a plain DFT and a post-twist.
StateVector position_to_momentum(const StateVector& state, const Grid& momentum) {
  const Grid& position = state.grid();
  require_dual(position, momentum);
  const auto n = static_cast<Eigen::Index>(position.size());
  const double x0 = position.origin(), dx = position.step();
  const double p0 = momentum.origin(), dp = momentum.step();

  Amplitudes twisted(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    twisted[k] = state.amplitudes()[k] * std::polar(1.0, -static_cast<double>(k) * p0 * dx);
  }
  Amplitudes out = dft(twisted, -1);
  const double scale = dx / std::sqrt(2.0 * std::numbers::pi);
  for (Eigen::Index j = 0; j < n; ++j) {
    out[j] *= scale * std::polar(1.0, -(p0 + static_cast<double>(j) * dp) * x0);
  }
  return StateVector(momentum, std::move(out));
}

StateVector momentum_to_position(const StateVector& state, const Grid& position) {
  const Grid& momentum = state.grid();
  require_dual(position, momentum);
  const auto n = static_cast<Eigen::Index>(position.size());
  const double x0 = position.origin(), dx = position.step();
  const double p0 = momentum.origin(), dp = momentum.step();

  Amplitudes twisted(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    twisted[j] = state.amplitudes()[j] * std::polar(1.0, static_cast<double>(j) * dp * x0);
  }
  Amplitudes out = dft(twisted, +1);
  const double scale = dp / std::sqrt(2.0 * std::numbers::pi);
  for (Eigen::Index k = 0; k < n; ++k) {
    out[k] *= scale * std::polar(1.0, p0 * (x0 + static_cast<double>(k) * dx));
  }
  return StateVector(position, std::move(out));
}

// ---------------------------------------------------------------------------
// Energy representation

double kg_measure_factor(double energy, double m) {
  const double e2 = energy * energy;
  const double p2 = e2 - m * m;
  if (!(p2 > 0.0)) {
    throw Error(ErrorKind::ZeroMomentum, "measure factor needs E > m");
  }
  return std::pow(e2 / p2, 0.25);
}

namespace {

// Cubic Lagrange interpolation of uniformly sampled data at coordinate u
// (in units of the sample index). The 4-point stencil is shifted inward at
// the edges. Returns 0 outside [0, n-1].
cplx cubic_sample(const Amplitudes& f, double u) {
  const auto n = f.size();
  if (u < 0.0 || u > static_cast<double>(n - 1)) return {0.0, 0.0};
  if (n < 4) throw Error(ErrorKind::InvalidArgument, "cubic interpolation needs 4 samples");
  auto base = static_cast<Eigen::Index>(std::floor(u)) - 1;
  base = std::clamp<Eigen::Index>(base, 0, n - 4);
  const double t = u - static_cast<double>(base);  // in [0, 3]
  cplx acc{0.0, 0.0};
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) w *= (t - b) / static_cast<double>(a - b);
    }
    acc += w * f[base + a];
  }
  return acc;
}

void require_right_movers(const Grid& momentum) {
  if (momentum.rep() != Representation::Momentum) {
    throw Error(ErrorKind::GridMismatch, "expected a momentum grid");
  }
  if (!(momentum.front() > 0.0)) {
    throw Error(ErrorKind::ZeroMomentum,
                "energy representation needs all grid momenta > 0 (right movers)");
  }
}

void require_mass(double m) {
  if (!(m >= 0.0) || !std::isfinite(m)) {
    throw Error(ErrorKind::InvalidArgument, "mass must be finite and non-negative");
  }
}

}  // namespace

StateVector momentum_to_energy(const StateVector& state, double m, const Grid& energy) {
  require_mass(m);
  const Grid& momentum = state.grid();
  require_right_movers(momentum);
  if (energy.rep() != Representation::EnergyHalfLine) {
    throw Error(ErrorKind::GridMismatch, "target must be a half-line energy grid");
  }
  Amplitudes out = Amplitudes::Zero(static_cast<Eigen::Index>(energy.size()));
  for (std::size_t k = 0; k < energy.size(); ++k) {
    const double e = energy.point(k);
    const double p2 = e * e - m * m;
    if (!(p2 > 0.0)) continue;
    const double p = std::sqrt(p2);
    const double u = (p - momentum.origin()) / momentum.step();
    out[static_cast<Eigen::Index>(k)] = cubic_sample(state.amplitudes(), u) * kg_measure_factor(e, m);
  }
  return StateVector(energy, std::move(out));
}

StateVector energy_to_momentum(const StateVector& state, double m, const Grid& momentum) {
  require_mass(m);
  require_right_movers(momentum);
  const Grid& energy = state.grid();
  if (energy.rep() != Representation::EnergyHalfLine) {
    throw Error(ErrorKind::GridMismatch, "source must be a half-line energy grid");
  }
  Amplitudes out(static_cast<Eigen::Index>(momentum.size()));
  for (std::size_t j = 0; j < momentum.size(); ++j) {
    const double p = momentum.point(j);
    const double e = std::sqrt(p * p + m * m);
    const double u = (e - energy.origin()) / energy.step();
    out[static_cast<Eigen::Index>(j)] = cubic_sample(state.amplitudes(), u) / kg_measure_factor(e, m);
  }
  return StateVector(momentum, std::move(out));
}

}  // namespace chronos
