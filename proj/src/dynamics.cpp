#include "chronos/dynamics.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace chronos {

Propagator::Propagator(const LinearOperator& h)
    : grid_(h.grid()), diagonal_(h.is_diagonal()) {
  const double defect = hermiticity_defect(h);
  if (defect > 1e-10) {
    throw Error(ErrorKind::NonHermitian, "Hamiltonian is not self-adjoint", defect);
  }
  if (diagonal_) {
    values_ = h.matrix().diagonal().real();
    return;
  }
  const Eigen::MatrixXcd herm = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::PreconditionViolated, "eigendecomposition did not converge");
  }
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Eigen::VectorXcd Propagator::apply(const Eigen::VectorXcd& v, double t) const {
  if (v.size() != values_.size()) {
    throw Error(ErrorKind::ShapeMismatch, "state size does not match the Hamiltonian");
  }
  Eigen::VectorXcd phase(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    phase[k] = std::polar(1.0, -values_[k] * t);
  }
  if (diagonal_) return phase.cwiseProduct(v);
  const Eigen::VectorXcd c = vectors_.adjoint() * v;
  return vectors_ * phase.cwiseProduct(c);
}

StateVector Propagator::evolve(const StateVector& state, double t) const {
  if (!same_lattice(state.grid(), grid_)) {
    throw Error(ErrorKind::GridMismatch, "state and Hamiltonian live on different grids");
  }
  return StateVector(grid_, apply(state.amplitudes(), t));
}

StateVector evolve(const StateVector& state, const LinearOperator& h, double t) {
  return Propagator(h).evolve(state, t);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "line fit needs two or more paired points");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::InvalidArgument, "line fit needs distinct abscissae");
  LineFit f{sxy / sxx, 0.0, 0.0};
  f.intercept = my - f.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

ExpectationSeries expectation_series(const LinearOperator& op, const StateVector& state0,
                                     const LinearOperator& h, std::span<const double> times) {
  const double defect = hermiticity_defect(op);
  if (defect > 1e-10) {
    throw Error(ErrorKind::NonHermitian, "observable is not self-adjoint", defect);
  }
  const Propagator u(h);
  ExpectationSeries s;
  s.times.assign(times.begin(), times.end());
  s.values.reserve(times.size());
  for (double t : times) {
    const cplx v = expectation(op, u.evolve(state0, t));
    s.values.push_back(v.real());
    s.max_imaginary = std::max(s.max_imaginary, std::abs(v.imag()));
  }
  if (times.size() >= 2) {
    const LineFit f = fit_line(s.times, s.values);
    s.fitted_slope = f.slope;
    s.fitted_intercept = f.intercept;
    s.fit_residual = f.rms;
  }
  return s;
}

std::vector<double> linspace(double t0, double t1, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = t0;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

ClassicalEnsemble sample_ensemble(std::size_t count, double m, double x0, double sigma_x,
                                  double p0, double sigma_p, std::uint64_t seed) {
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "mass must be positive");
  if (!(sigma_x >= 0.0) || !(sigma_p >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "widths must be non-negative");
  }
  constexpr std::size_t kBlock = 1024;
  ClassicalEnsemble e;
  e.m = m;
  e.seed = seed;
  e.samples.resize(count);
  for (std::size_t b = 0; b * kBlock < count; ++b) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 gen(sq);
    std::normal_distribution<double> nx(x0, sigma_x > 0.0 ? sigma_x : 1.0);
    std::normal_distribution<double> np(p0, sigma_p > 0.0 ? sigma_p : 1.0);
    const std::size_t end = std::min(count, (b + 1) * kBlock);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      const double x = nx(gen);
      const double p = np(gen);
      e.samples[i] = {sigma_x > 0.0 ? x : x0, sigma_p > 0.0 ? p : p0};
    }
  }
  return e;
}

ArrivalEstimate classical_arrival_oracle(const ClassicalEnsemble& ensemble) {
  const auto& s = ensemble.samples;
  if (s.empty()) throw Error(ErrorKind::InvalidArgument, "empty ensemble");
  // Welford keeps the variance stable for 1e6 samples.
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (const PhaseSample& q : s) {
    if (q.p == 0.0) throw Error(ErrorKind::ZeroMomentum, "sample with p = 0");
    const double t = -ensemble.m * q.x / q.p;
    ++k;
    const double d = t - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (t - mean);
  }
  const double n = static_cast<double>(s.size());
  const double stderr_ = s.size() > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
  return {mean, stderr_};
}

}  // namespace chronos
