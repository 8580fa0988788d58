#include "chronos/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

#include "chronos/dynamics.hpp"
#include "chronos/energy_shift.hpp"
#include "chronos/error.hpp"
#include "chronos/lattice.hpp"
#include "chronos/opalg.hpp"
#include "chronos/time_construct.hpp"
#include "chronos/uncertainty.hpp"

namespace chronos {

namespace {

constexpr double kStdStep = 10.0 / 512.0;
constexpr double kHuge = 1e6;

KeySpec integer_key(std::string name, double def, double lo, double hi, std::string help) {
  return {std::move(name), KeyType::Integer, def, lo, hi, std::move(help)};
}

KeySpec real_key(std::string name, double def, double lo, double hi, std::string help) {
  return {std::move(name), KeyType::Real, def, lo, hi, std::move(help)};
}

std::vector<KeySpec> momentum_grid_keys(double n = 512, double step = kStdStep) {
  return {integer_key("n", n, 2, 2048, "grid points"),
          real_key("step", step, 1e-6, 10.0, "momentum spacing")};
}

std::vector<KeySpec> packet_keys() {
  return {real_key("m", 1.0, 1e-6, 1e3, "mass"),
          real_key("p0", 2.0, -kHuge, kHuge, "packet centre momentum"),
          real_key("sigma_p", 0.05, 1e-6, kHuge, "packet momentum width"),
          real_key("x0", -10.0, -kHuge, kHuge, "packet centre position")};
}

KeySpec seed_key() { return integer_key("seed", 20240601, 0, 4294967295.0, "random seed"); }

std::vector<KeySpec> concat(std::initializer_list<std::vector<KeySpec>> parts) {
  std::vector<KeySpec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<ExperimentInfo> build_catalog() {
  std::vector<ExperimentInfo> c;
  c.push_back({"commutators", "[H, T] = +-i residuals for every arrival-time operator",
               concat({momentum_grid_keys(),
                       {real_key("m", 1.0, 1e-6, 1e3, "mass"),
                        real_key("kg_origin", 0.5, 1e-6, kHuge, "first point of the p > 0 grid"),
                        integer_key("states", 10, 1, 1000, "interior Gaussian states"),
                        seed_key()}})});
  c.push_back({"mt-bound", "Mandelstam-Tamm bound over random states (free H, A = x)",
               concat({momentum_grid_keys(128, 10.0 / 128.0),
                       {real_key("m", 1.0, 1e-6, 1e3, "mass"),
                        integer_key("states", 1000, 1, 1e6, "random states"), seed_key()}})});
  c.push_back({"t2-linear-potential", "T2 for A = p under H = p^2/2m + m g q",
               concat({momentum_grid_keys(), packet_keys(),
                       {real_key("g", 1.0, 1e-6, 1e3, "field strength"),
                        integer_key("states", 10, 1, 1000, "interior Gaussian states"),
                        seed_key()}})});
  c.push_back({"kg-equivalence", "Klein-Gordon arrival time: general, symmetric, closed and energy forms",
               concat({momentum_grid_keys(),
                       {real_key("origin", 0.5, 1e-6, kHuge, "first point of the p > 0 grid"),
                        real_key("m", 1.0, 0.0, 1e3, "mass"),
                        integer_key("states", 10, 1, 1000, "interior Gaussian states"),
                        seed_key()}})});
  c.push_back({"dirac-reduction", "General relativistic form against -alpha1 x - beta tau",
               concat({momentum_grid_keys(),
                       {real_key("m", 1.0, 1e-6, 1e3, "mass"),
                        integer_key("states", 10, 1, 1000, "interior Gaussian states"),
                        seed_key()}})});
  c.push_back({"drift-law", "<T1>(t) slope under free evolution",
               concat({momentum_grid_keys(), packet_keys(),
                       {real_key("t_end", 2.0, 1e-6, 1e3, "last time"),
                        integer_key("steps", 21, 2, 10000, "time points"), seed_key()}})});
  c.push_back({"shift-dichotomy", "Half-line shifts: isometry up, exact mass defect down, transition amplitudes",
               {integer_key("M", 256, 2, 100000, "lattice half-width"),
                real_key("delta_e", 1.0, 1e-9, kHuge, "energy step"),
                integer_key("e_max", 32, 0, 100000, "largest energy index swept"),
                integer_key("j_max", 40, 0, 100000, "largest |shift| swept"),
                integer_key("states", 20, 1, 10000, "random states per shift"), seed_key()}});
  c.push_back({"transition-matrix", "<E', 0 | E, e> row for one (E, e)",
               {integer_key("M", 16, 1, 100000, "lattice half-width"),
                real_key("delta_e", 1.0, 1e-9, kHuge, "energy step"),
                integer_key("e_idx", 2, 0, 100000, "energy index of the initial state"),
                integer_key("j", -5, -100000, 100000, "shift in lattice steps"), seed_key()}});
  c.push_back({"classical-compare", "<T1> against the Monte Carlo mean of -m x / p",
               concat({momentum_grid_keys(), packet_keys(),
                       {integer_key("samples", 1000000, 1, 1e8, "Monte Carlo samples"),
                        seed_key()}})});
  return c;
}

// ---------------------------------------------------------------------------
// Parsing helpers

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const KeySpec& spec, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(v)) {
    throw Error(ErrorKind::Config, spec.name + ": '" + text + "' is not a finite number");
  }
  if (spec.type == KeyType::Integer && v != std::floor(v)) {
    throw Error(ErrorKind::Config, spec.name + ": '" + text + "' is not an integer");
  }
  if (v < spec.min_value || v > spec.max_value) {
    std::ostringstream msg;
    msg << spec.name << ": " << text << " outside [" << spec.min_value << ", " << spec.max_value
        << "]";
    throw Error(ErrorKind::Config, msg.str());
  }
  return v;
}

void config_fail(const std::string& field, const std::string& reason) {
  throw Error(ErrorKind::Config, field + ": " + reason);
}

// Cross-field rules that a per-key range cannot express.
void validate_combined(const ExperimentConfig& c) {
  const std::string& e = c.experiment;
  if (e == "transition-matrix") {
    const long long m = c.get_int("M");
    const long long j = c.get_int("j");
    const long long idx = c.get_int("e_idx");
    if (idx > m) config_fail("e_idx", "exceeds lattice half-width M");
    if (j < -m || j > m) config_fail("j", "|j| exceeds lattice half-width M");
    if (idx + j > m) config_fail("j", "shifted energy index exceeds M");
  }
  if (e == "shift-dichotomy") {
    const long long m = c.get_int("M");
    if (c.get_int("j_max") >= m) config_fail("j_max", "must be smaller than M");
    if (c.get_int("e_max") + c.get_int("j_max") > m) config_fail("e_max", "e_max + j_max exceeds M");
  }
  if (e == "classical-compare" || e == "drift-law" || e == "t2-linear-potential") {
    if (c.get("p0") == 0.0) config_fail("p0", "must be non-zero");
  }
  if (e == "classical-compare" && c.get("sigma_p") / std::abs(c.get("p0")) > 0.05) {
    config_fail("sigma_p", "sigma_p / |p0| must not exceed 0.05 for the classical comparison");
  }
}

// ---------------------------------------------------------------------------
// Shared physics helpers

constexpr cplx kI{0.0, 1.0};

std::vector<SpinorState> spinor_suite(const std::vector<StateVector>& scalars) {
  std::vector<SpinorState> out;
  const std::size_t k = scalars.size();
  for (std::size_t i = 0; i < k; ++i) {
    const StateVector& up = scalars[i];
    const StateVector& lo = scalars[(i + 1) % k];
    out.push_back(SpinorState(up.grid(), up.amplitudes(), 0.5 * lo.amplitudes()).normalized());
  }
  return out;
}

double max_conjugacy(const LinearOperator& h, const LinearOperator& t, int sign,
                     const std::vector<StateVector>& suite) {
  double r = 0.0;
  for (const auto& s : suite) r = std::max(r, conjugacy_residual(h, t, sign, s.amplitudes()));
  return r;
}

double max_conjugacy(const LinearOperator& h, const LinearOperator& t, int sign,
                     const std::vector<SpinorState>& suite) {
  double r = 0.0;
  for (const auto& s : suite) r = std::max(r, conjugacy_residual(h, t, sign, s.amplitudes()));
  return r;
}

std::vector<StateVector> rewrap(const std::vector<StateVector>& states, const Grid& grid) {
  std::vector<StateVector> out;
  for (const auto& s : states) out.emplace_back(grid, s.amplitudes());
  return out;
}

Grid positive_grid(std::size_t n, double origin, double step) {
  return make_grid(n, origin, step, Representation::Momentum);
}

std::size_t as_size(long long v) { return static_cast<std::size_t>(v); }

// ---------------------------------------------------------------------------
// Experiments

void run_commutators(const ExperimentConfig& c, ExperimentReport& r) {
  const double m = c.get("m");
  const std::size_t n = as_size(c.get_int("n"));
  const std::size_t count = as_size(c.get_int("states"));
  const Grid grid = offset_momentum_grid(n, c.get("step"));
  const auto suite = interior_gaussian_suite(grid, count);
  const LinearOperator h = free_hamiltonian(grid, m);

  const auto t1 = t1_from_dynamical(conjugate_coordinate(grid), h, suite);
  r.check("t1.conjugacy_residual", max_conjugacy(h, t1.op, t1.expected_commutator_sign, suite), 1e-6);

  const auto tn = t_free_nonrel(m, grid);
  r.check("t_non.conjugacy_residual", max_conjugacy(h, tn.op, tn.expected_commutator_sign, suite), 1e-6);

  const auto tau = proper_time(m, grid);
  r.check("proper_time.conjugacy_residual",
          max_conjugacy(h, tau.op, tau.expected_commutator_sign, suite), 1e-6);

  const Grid kg = positive_grid(n, c.get("kg_origin"), c.get("step"));
  const auto kg_suite = interior_gaussian_suite(kg, count);
  const LinearOperator hk = multiplication_operator(
      kg, [m](double p) { return cplx{std::sqrt(p * p + m * m), 0.0}; });
  const auto tk = t_kg_momentum(m, kg);
  r.check("t_kg_momentum.conjugacy_residual",
          max_conjugacy(hk, tk.op, tk.expected_commutator_sign, kg_suite), 1e-6);

  const Grid energy = make_grid(n, 0.0, c.get("step"), Representation::EnergyHalfLine);
  const auto te = t_kg_energy_rep(energy);
  r.check("t_kg_energy.conjugacy_residual",
          max_conjugacy(hamiltonian_h0(energy), te.op, te.expected_commutator_sign,
                        rewrap(kg_suite, energy)),
          1e-6);

  const DiracAlgebra alg = DiracAlgebra::standard();
  const LinearOperator hd = dirac_hamiltonian(m, grid, alg);
  const auto td = t_dirac(m, grid, alg);
  r.check("t_dirac.conjugacy_residual",
          max_conjugacy(hd, td.op, td.expected_commutator_sign, spinor_suite(suite)), 1e-6);
}

void run_mt_bound(const ExperimentConfig& c, ExperimentReport& r) {
  const Grid grid = offset_momentum_grid(as_size(c.get_int("n")), c.get("step"));
  const LinearOperator h = free_hamiltonian(grid, c.get("m"));
  const LinearOperator a = conjugate_coordinate(grid);
  const auto seed = static_cast<std::uint64_t>(c.get_int("seed"));
  const long long count = c.get_int("states");
  const auto n = static_cast<Eigen::Index>(grid.size());

  long long violations = 0;
  double min_lhs = std::numeric_limits<double>::infinity();
  for (long long i = 0; i < count; ++i) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(i)};
    std::mt19937_64 gen(sq);
    std::normal_distribution<double> nd;
    Amplitudes amps(n);
    for (Eigen::Index k = 0; k < n; ++k) amps[k] = cplx{nd(gen), nd(gen)};
    const StateVector psi = StateVector(grid, std::move(amps)).normalized();
    const UncertaintyReport u = mt_time_deviation(a, h, psi);
    if (!u.satisfied) ++violations;
    min_lhs = std::min(min_lhs, u.bound_lhs);
  }
  r.check("violations", static_cast<double>(violations), 0.0);
  r.check("bound_shortfall", std::max(0.0, 0.5 - min_lhs), 1e-9);
}

void run_t2_linear(const ExperimentConfig& c, ExperimentReport& r) {
  const double m = c.get("m");
  const double g = c.get("g");
  const Grid grid = offset_momentum_grid(as_size(c.get_int("n")), c.get("step"));
  const LinearOperator h = linear_potential_hamiltonian(grid, m, g);
  const LinearOperator p = multiplication_operator(
      grid, [](double q) { return cplx{q, 0.0}; }, [](double) { return cplx{1.0, 0.0}; });
  const StateVector psi = gaussian_state(grid, c.get("p0"), c.get("sigma_p"), c.get("x0"));

  const cplx drift = heisenberg_drift(p, h, psi, CommutatorRoute::Canonical);
  r.check("drift_error", std::abs(drift - cplx{-m * g, 0.0}) / (m * g), 1e-14);

  const auto t2 = t2_mandelstam(p, h, psi, CommutatorRoute::Canonical);
  const LinearOperator want = cplx{1.0 / (m * g), 0.0} * p;
  r.check("t2_vs_p_over_mg", entrywise_distance(t2.op, want), 1e-12);

  const auto suite = interior_gaussian_suite(grid, as_size(c.get_int("states")));
  r.check("commutator_residual", max_conjugacy(h, t2.op, t2.expected_commutator_sign, suite), 1e-6);
  r.check("average_commutator_error", std::abs(average_commutator(h, t2.op, psi) - kI), 1e-8);
}

void run_kg_equivalence(const ExperimentConfig& c, ExperimentReport& r) {
  const double m = c.get("m");
  const Grid grid = positive_grid(as_size(c.get_int("n")), c.get("origin"), c.get("step"));
  const auto suite = interior_gaussian_suite(grid, as_size(c.get_int("states")));
  const LinearOperator h = multiplication_operator(
      grid, [m](double p) { return cplx{std::sqrt(p * p + m * m), 0.0}; });

  const auto sym = t_kg_momentum(m, grid);
  const LinearOperator general = t_relativistic_general(h, grid);
  r.check("general_vs_symmetric", entrywise_distance(general, sym.op), 1e-12);

  const LinearOperator closed = kg_closed_form(m, grid);
  const LinearOperator w = kg_measure_operator(m, grid);
  const LinearOperator w_inv = multiplication_operator(grid, [m](double p) {
    return cplx{1.0 / kg_measure_factor(std::sqrt(p * p + m * m), m), 0.0};
  });
  // -i d/dE written in momentum coordinates: dE = (p / E) dp.
  const LinearOperator d_de = multiplication_operator(grid, [m](double p) {
    return cplx{std::sqrt(p * p + m * m) / p, 0.0};
  }) * derivative_operator(grid, DerivativeScheme::Spectral);
  const LinearOperator energy_form = cplx{0.0, -1.0} * (w_inv * d_de * w);

  double closed_res = 0.0, chain_res = 0.0;
  for (const auto& s : suite) {
    const Eigen::VectorXcd ts = sym.op.apply(s.amplitudes());
    closed_res = std::max(closed_res, relative_residual(closed.apply(s.amplitudes()), ts));
    chain_res = std::max(chain_res, relative_residual(energy_form.apply(s.amplitudes()), ts));
  }
  r.check("closed_vs_symmetric", closed_res, 1e-6);
  r.check("energy_chain_residual", chain_res, 1e-6);
}

void run_dirac(const ExperimentConfig& c, ExperimentReport& r) {
  const double m = c.get("m");
  const Grid grid = offset_momentum_grid(as_size(c.get_int("n")), c.get("step"));
  const DiracAlgebra alg = DiracAlgebra::standard();
  r.check("algebra_defect", alg.invariant_defect(), 1e-15);

  const LinearOperator hd = dirac_hamiltonian(m, grid, alg);
  const LinearOperator e2 = with_spin(
      Eigen::Matrix2cd::Identity(),
      multiplication_operator(grid, [m](double p) { return cplx{p * p + m * m, 0.0}; }));
  r.check("h_squared_deviation", entrywise_distance(hd * hd, e2), 1e-12);

  const auto suite = spinor_suite(interior_gaussian_suite(grid, as_size(c.get_int("states"))));
  const LinearOperator general = t_relativistic_general(hd, grid);
  const auto td = t_dirac(m, grid, alg);
  double red = 0.0;
  for (const auto& s : suite) {
    red = std::max(red, relative_residual(general.apply(s.amplitudes()), td.op.apply(s.amplitudes())));
  }
  r.check("general_vs_closed", red, 1e-6);
  r.check("t_dirac.conjugacy_residual", max_conjugacy(hd, td.op, td.expected_commutator_sign, suite),
          1e-6);
}

void run_drift_law(const ExperimentConfig& c, ExperimentReport& r) {
  const double m = c.get("m");
  const Grid grid = offset_momentum_grid(as_size(c.get_int("n")), c.get("step"));
  const LinearOperator h = free_hamiltonian(grid, m);
  const StateVector psi = gaussian_state(grid, c.get("p0"), c.get("sigma_p"), c.get("x0"));
  const auto t1 = t1_from_dynamical(conjugate_coordinate(grid), h);
  const auto times = linspace(0.0, c.get("t_end"), as_size(c.get_int("steps")));

  const ExpectationSeries s = expectation_series(t1.op, psi, h, times);
  const double expected = -static_cast<double>(t1.expected_commutator_sign);
  r.check("fitted_slope_error", std::abs(s.fitted_slope - expected), 1e-3);
  r.check("fit_rms", s.fit_residual, 1e-3);
  r.check("max_imaginary", s.max_imaginary, 1e-9);

  const Propagator u(h);
  double norm_dev = 0.0;
  for (double t : times) norm_dev = std::max(norm_dev, std::abs(u.evolve(psi, t).norm() - 1.0));
  r.check("norm_drift", norm_dev, 1e-10);
}

void run_shift_dichotomy(const ExperimentConfig& c, ExperimentReport& r) {
  const int mm = static_cast<int>(c.get_int("M"));
  const int e_max = static_cast<int>(c.get_int("e_max"));
  const int j_max = static_cast<int>(c.get_int("j_max"));
  const EnergyLatticePair lat = make_energy_lattice(mm, c.get("delta_e"));
  const auto seed = static_cast<std::uint64_t>(c.get_int("seed"));
  const long long count = c.get_int("states");
  const Eigen::Index h = mm + 1;
  const double de = lat.delta_e;

  long long isometry_breaks = 0, defect_mismatch = 0, dilation_breaks = 0;
  double balance = 0.0;
  for (long long i = 0; i < count; ++i) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(i)};
    std::mt19937_64 gen(sq);
    std::normal_distribution<double> nd;
    // Top j_max bins stay empty so upward shifts never reach the lattice edge.
    Amplitudes amps = Amplitudes::Zero(h);
    for (Eigen::Index k = 0; k < h - j_max; ++k) amps[k] = cplx{nd(gen), nd(gen)};
    const StateVector psi = StateVector(lat.half, std::move(amps)).normalized();
    const Amplitudes& a = psi.amplitudes();

    for (int j = -j_max; j <= j_max; ++j) {
      const ShiftResult res = restricted_shift(psi, j, lat);
      const Amplitudes& b = res.state.amplitudes();
      if (j >= 0) {
        if (b.segment(j, h - j) != a.head(h - j) || !b.head(j).isZero(0.0) ||
            res.report.defect != 0.0) {
          ++isometry_breaks;
        }
      } else {
        double lowest = 0.0;
        for (int k = 0; k < -j; ++k) lowest += std::norm(a[k]);
        if (res.report.defect != lowest * de) ++defect_mismatch;
      }
      const double lhs = res.report.input_norm * res.report.input_norm -
                         res.report.output_norm * res.report.output_norm;
      balance = std::max(balance, std::abs(lhs - res.report.defect - res.report.edge_loss));
      const StateVector via_full =
          restrict_to_half(v_shift_full(embed(psi, lat), j, lat).state, lat);
      if (via_full.amplitudes() != b) ++dilation_breaks;
    }
  }
  r.check("isometry_breaks", static_cast<double>(isometry_breaks), 0.0);
  r.check("defect_mismatches", static_cast<double>(defect_mismatch), 0.0);
  r.check("dilation_mismatches", static_cast<double>(dilation_breaks), 0.0);
  r.check("norm_balance", balance, 1e-14);

  long long non_binary = 0, misclassified = 0;
  for (int e = 0; e <= e_max; ++e) {
    for (int j = -j_max; j <= j_max; ++j) {
      const std::vector<cplx> row = transition_amplitude(e, j, lat);
      const int target = e + j;
      for (int k = 0; k < static_cast<int>(row.size()); ++k) {
        const cplx want = (target >= 0 && k == target) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
        if (row[static_cast<std::size_t>(k)] != want) {
          ++non_binary;
          break;
        }
      }
      const StateClass cls = classify_state(e, j, lat);
      if ((cls == StateClass::Physical) != (target >= 0)) ++misclassified;
    }
  }
  r.check("transition_non_binary", static_cast<double>(non_binary), 0.0);
  r.check("classification_mismatches", static_cast<double>(misclassified), 0.0);
}

void run_transition_matrix(const ExperimentConfig& c, ExperimentReport& r) {
  const EnergyLatticePair lat = make_energy_lattice(static_cast<int>(c.get_int("M")), c.get("delta_e"));
  const int e = static_cast<int>(c.get_int("e_idx"));
  const int j = static_cast<int>(c.get_int("j"));
  const std::vector<cplx> row = transition_amplitude(e, j, lat);
  const int target = e + j;
  double dev = 0.0, prob = 0.0;
  for (int k = 0; k < static_cast<int>(row.size()); ++k) {
    const cplx want = (target >= 0 && k == target) ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
    dev = std::max(dev, std::abs(row[static_cast<std::size_t>(k)] - want));
    prob += std::norm(row[static_cast<std::size_t>(k)]);
  }
  const bool physical = classify_state(e, j, lat) == StateClass::Physical;
  r.check("row_deviation", dev, 0.0);
  r.check("probability_deviation", std::abs(prob - (physical ? 1.0 : 0.0)), 0.0);
  r.check("classification_mismatch", physical == (target >= 0) ? 0.0 : 1.0, 0.0);
}

void run_classical_compare(const ExperimentConfig& c, ExperimentReport& r) {
  const double m = c.get("m");
  const double p0 = c.get("p0");
  const double sp = c.get("sigma_p");
  const double x0 = c.get("x0");
  const Grid grid = offset_momentum_grid(as_size(c.get_int("n")), c.get("step"));
  const LinearOperator h = free_hamiltonian(grid, m);
  const StateVector psi = gaussian_state(grid, p0, sp, x0);
  const auto t1 = t1_from_dynamical(conjugate_coordinate(grid), h);
  const double quantum = expectation(t1.op, psi).real();

  const ClassicalEnsemble ens = sample_ensemble(as_size(c.get_int("samples")), m, x0,
                                                1.0 / (2.0 * sp), p0, sp,
                                                static_cast<std::uint64_t>(c.get_int("seed")));
  const ArrivalEstimate est = classical_arrival_oracle(ens);
  r.check("width_ratio", sp / std::abs(p0), 0.05);
  r.check("quantum_vs_classical", std::abs(quantum - est.mean), 3.0 * (est.stderr_ + 0.03));
}

using Runner = void (*)(const ExperimentConfig&, ExperimentReport&);

Runner runner_for(std::string_view name) {
  if (name == "commutators") return run_commutators;
  if (name == "mt-bound") return run_mt_bound;
  if (name == "t2-linear-potential") return run_t2_linear;
  if (name == "kg-equivalence") return run_kg_equivalence;
  if (name == "dirac-reduction") return run_dirac;
  if (name == "drift-law") return run_drift_law;
  if (name == "shift-dichotomy") return run_shift_dichotomy;
  if (name == "transition-matrix") return run_transition_matrix;
  if (name == "classical-compare") return run_classical_compare;
  throw Error(ErrorKind::Config, "experiment: unknown name '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Output

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_number(double v) { return std::isfinite(v) ? number(v) : "null"; }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog = build_catalog();
  return catalog;
}

const ExperimentInfo& find_experiment(std::string_view name) {
  for (const auto& e : experiment_catalog()) {
    if (e.name == name) return e;
  }
  throw Error(ErrorKind::Config, "experiment: unknown name '" + std::string(name) + "'");
}

KeyValues parse_config_text(std::string_view text) {
  KeyValues out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorKind::Config, "line " + std::to_string(lineno) + ": empty key");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KeyValues read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot read config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

double ExperimentConfig::get(std::string_view key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw Error(ErrorKind::Config, std::string(key) + ": not a parameter of " + experiment);
}

long long ExperimentConfig::get_int(std::string_view key) const {
  return static_cast<long long>(get(key));
}

ExperimentConfig resolve_config(std::string_view experiment, const KeyValues& file,
                                const KeyValues& overrides,
                                std::optional<std::string> seed_override) {
  const ExperimentInfo& info = find_experiment(experiment);
  ExperimentConfig c;
  c.experiment = info.name;
  for (const auto& k : info.keys) c.values.emplace_back(k.name, k.default_value);

  auto assign = [&](const std::string& key, const std::string& text) {
    for (std::size_t i = 0; i < info.keys.size(); ++i) {
      if (info.keys[i].name == key) {
        c.values[i].second = parse_number(info.keys[i], text);
        return;
      }
    }
    throw Error(ErrorKind::Config, key + ": unknown key for experiment " + info.name);
  };
  for (const auto& [k, v] : file) assign(k, v);
  for (const auto& [k, v] : overrides) assign(k, v);
  if (seed_override) assign("seed", *seed_override);
  validate_combined(c);
  return c;
}

void ExperimentReport::check(std::string metric, double value, double tolerance) {
  rows.push_back({std::move(metric), value, tolerance, value <= tolerance});
}

bool ExperimentReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const Runner runner = runner_for(config.experiment);
  ExperimentReport r;
  r.experiment = config.experiment;
  r.params = config.values;
  const auto start = std::chrono::steady_clock::now();
  runner(config, r);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ReportFormat parse_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw Error(ErrorKind::Config, "format: expected csv or json, got '" + std::string(s) + "'");
}

std::string format_report(const ExperimentReport& report, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::Csv) {
    out << "metric,value,tolerance,pass\n";
    for (const auto& row : report.rows) {
      out << row.metric << ',' << number(row.value) << ',' << number(row.tolerance) << ','
          << (row.pass ? "true" : "false") << '\n';
    }
    return out.str();
  }
  out << "{\n  \"experiment\": " << json_string(report.experiment);
  for (const auto& [k, v] : report.params) {
    out << ",\n  " << json_string("param." + k) << ": " << json_number(v);
  }
  for (const auto& row : report.rows) {
    out << ",\n  " << json_string(row.metric + ".value") << ": " << json_number(row.value);
    out << ",\n  " << json_string(row.metric + ".tolerance") << ": " << json_number(row.tolerance);
    out << ",\n  " << json_string(row.metric + ".pass") << ": " << (row.pass ? "true" : "false");
  }
  out << ",\n  \"passed\": " << (report.passed() ? "true" : "false") << "\n}\n";
  return out.str();
}

void write_report(const ExperimentReport& report, const std::string& path, ReportFormat format) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path + " for writing");
  f << format_report(report, format);
  if (!f.flush()) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace chronos
