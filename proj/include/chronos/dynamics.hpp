#pragma once

// Unitary evolution, expectation time series with a linear fit, and the
// classical Monte Carlo arrival-time oracle t = -m x / p.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chronos/lattice.hpp"
#include "chronos/opalg.hpp"

namespace chronos {

// exp(-i H t) from one eigendecomposition, reused across time points.
class Propagator {
 public:
  // H must be Hermitian (defect <= 1e-10).
  explicit Propagator(const LinearOperator& h);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v, double t) const;
  StateVector evolve(const StateVector& state, double t) const;

  const Eigen::VectorXd& eigenvalues() const noexcept { return values_; }

 private:
  Grid grid_;
  bool diagonal_;
  Eigen::VectorXd values_;
  Eigen::MatrixXcd vectors_;
};

StateVector evolve(const StateVector& state, const LinearOperator& h, double t);

struct ExpectationSeries {
  std::vector<double> times;
  std::vector<double> values;
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
  // RMS deviation from the fitted line.
  double fit_residual = 0.0;
  // Largest |Im <op>| seen along the series.
  double max_imaginary = 0.0;
};

// Least-squares line through (x, y).
struct LineFit {
  double slope;
  double intercept;
  double rms;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

ExpectationSeries expectation_series(const LinearOperator& op, const StateVector& state0,
                                     const LinearOperator& h, std::span<const double> times);

// `count` evenly spaced points from t0 to t1 inclusive.
std::vector<double> linspace(double t0, double t1, std::size_t count);

struct PhaseSample {
  double x;
  double p;
};

struct ClassicalEnsemble {
  std::vector<PhaseSample> samples;
  double m = 1.0;
  std::uint64_t seed = 0;
};

// Independent normal draws x ~ N(x0, sigma_x^2), p ~ N(p0, sigma_p^2).
// Samples come in blocks of 1024, each with its own generator seeded from
// (seed, block index), so the ensemble does not depend on how it is split.
ClassicalEnsemble sample_ensemble(std::size_t count, double m, double x0, double sigma_x,
                                  double p0, double sigma_p, std::uint64_t seed);

struct ArrivalEstimate {
  double mean;
  double stderr_;
};

// Sample mean and standard error of -m x / p.
ArrivalEstimate classical_arrival_oracle(const ClassicalEnsemble& ensemble);

}  // namespace chronos
