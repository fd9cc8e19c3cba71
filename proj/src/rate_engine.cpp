#include "prs/rate_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "prs/adaptive_integrator.hpp"
#include "prs/errors.hpp"
#include "prs/matrix_exponential.hpp"

namespace prs {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void require(bool condition, const char* field, const char* message) {
  if (!condition) throw std::invalid_argument(std::string(field) + ": " + message);
}

/// Adds a transition src -> dst at `rate`, keeping columns conservative.
void add_transition(Triplets& triplets, Eigen::Index src, Eigen::Index dst, double rate) {
  if (rate == 0.0) return;
  triplets.emplace_back(dst, src, rate);
  triplets.emplace_back(src, src, -rate);
}

Eigen::SparseMatrix<double> assemble(Eigen::Index dimension, const Triplets& triplets) {
  Eigen::SparseMatrix<double> m(dimension, dimension);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

void SpectroscopyScenario::validate() const {
  require(grid.n_ip_max >= 1 && grid.n_op_max >= 1, "grid", "bounds must be at least 1");
  require(sidebands.ip >= 1 && sidebands.op >= 1, "sidebands", "truncation must be at least 1");
  require(heating.ip >= 0.0 && heating.op >= 0.0, "heating", "rates must be non-negative");
  require(line.gamma_t >= 0.0, "transition.gamma", "must be non-negative");
  require(line.omega_t > 0.0, "transition.wavelength", "must be positive");
  require(line.absorption_scale > 0.0 && line.absorption_scale <= 1.0, "transition.absorption_scale",
          "must lie in (0, 1]");
  require(line.stimulated_scale > 0.0 && line.stimulated_scale <= 1.0, "transition.stimulated_scale",
          "must lie in (0, 1]");
  require(laser.intensity >= 0.0, "laser.intensity", "must be non-negative");
  require(laser.fwhm >= 0.0, "laser.fwhm", "must be non-negative");
  require(beam.wavelength > 0.0, "laser.wavelength", "must be positive");
  require(beam.axial_projection >= 0.0 && beam.axial_projection <= 1.0, "laser.axial_projection",
          "must lie in [0, 1]");
  require(leak_warning_threshold > 0.0 && leak_warning_threshold <= 1.0, "leak_warning", "must lie in (0, 1]");
}

// ---------------------------------------------------------------------------

PopulationState::PopulationState(GridBounds grid)
    : grid_(grid), values_(2 * static_cast<std::size_t>(grid.n_ip_max + 1) * (grid.n_op_max + 1) + 1, 0.0) {}

PopulationState PopulationState::motional_ground(GridBounds grid, InternalState internal) {
  PopulationState state(grid);
  state.at(internal, 0, 0) = 1.0;
  return state;
}

PopulationState PopulationState::from_vector(GridBounds grid, const Eigen::VectorXd& values) {
  PopulationState state(grid);
  if (static_cast<std::size_t>(values.size()) != state.values_.size()) {
    throw std::invalid_argument("PopulationState::from_vector: dimension mismatch");
  }
  std::copy(values.data(), values.data() + values.size(), state.values_.begin());
  return state;
}

double PopulationState::marginal(int n_ip, int n_op) const {
  return at(InternalState::ground, n_ip, n_op) + at(InternalState::excited, n_ip, n_op);
}

double PopulationState::in_grid() const {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < values_.size(); ++i) sum += values_[i];
  return sum;
}

Eigen::VectorXd PopulationState::to_vector() const {
  return Eigen::Map<const Eigen::VectorXd>(values_.data(), static_cast<Eigen::Index>(values_.size()));
}

// ---------------------------------------------------------------------------

RateModel::RateModel(const SpectroscopyScenario& scenario)
    : scenario_(scenario),
      coupling_(scenario.laser_lamb_dicke(), scenario.grid.n_ip_max, scenario.grid.n_op_max, scenario.sidebands.ip,
                scenario.sidebands.op) {
  scenario_.validate();
  const GridBounds grid = scenario_.grid;
  const SidebandLimits sb = scenario_.sidebands;
  const PopulationState layout(grid);
  const auto dimension = static_cast<Eigen::Index>(layout.dimension());
  const auto leak = dimension - 1;
  const auto in_grid = [&](int a, int b) { return a <= grid.n_ip_max && b <= grid.n_op_max; };
  const auto target = [&](InternalState internal, int a, int b) -> Eigen::Index {
    return in_grid(a, b) ? static_cast<Eigen::Index>(layout.index(internal, a, b)) : leak;
  };

  const bool spontaneous = scenario_.spontaneous_emission && scenario_.line.gamma_t > 0.0;
  if (spontaneous) {
    emission_ = emission_coefficients(scenario_.pattern, scenario_.line, scenario_.system, grid.n_ip_max,
                                      grid.n_op_max, sb.ip, sb.op);
  }

  Triplets absorption;
  Triplets stimulated;
  Triplets fixed;
  for (int a = 0; a <= grid.n_ip_max; ++a) {
    for (int b = 0; b <= grid.n_op_max; ++b) {
      const auto g = static_cast<Eigen::Index>(layout.index(InternalState::ground, a, b));
      const auto e = static_cast<Eigen::Index>(layout.index(InternalState::excited, a, b));
      for (int s = -sb.ip; s <= sb.ip; ++s) {
        if (a + s < 0) continue;
        for (int t = -sb.op; t <= sb.op; ++t) {
          if (b + t < 0) continue;
          const double strength = coupling_.strength({a, b}, {s, t});
          add_transition(absorption, g, target(InternalState::excited, a + s, b + t), strength);
          add_transition(stimulated, e, target(InternalState::ground, a + s, b + t), strength);
          if (spontaneous) {
            add_transition(fixed, e, target(InternalState::ground, a + s, b + t),
                           scenario_.line.gamma_t * emission_({a, b}, {s, t}));
          }
        }
      }
      for (const InternalState internal : {InternalState::ground, InternalState::excited}) {
        const auto src = static_cast<Eigen::Index>(layout.index(internal, a, b));
        add_transition(fixed, src, target(internal, a + 1, b), scenario_.heating.ip);
        add_transition(fixed, src, target(internal, a, b + 1), scenario_.heating.op);
      }
    }
  }
  absorption_ = assemble(dimension, absorption);
  stimulated_ = assemble(dimension, stimulated);
  fixed_ = assemble(dimension, fixed);
}

double RateModel::absorption_rate(double detuning) const {
  return base_rate(scenario_.laser, scenario_.line, detuning, Channel::absorption, scenario_.regime);
}

double RateModel::stimulated_rate(double detuning) const {
  return base_rate(scenario_.laser, scenario_.line, detuning, Channel::stimulated, scenario_.regime);
}

RateMatrix RateModel::build(double detuning) const {
  RateMatrix matrix{scenario_.grid, {}};
  matrix.generator = absorption_rate(detuning) * absorption_ + stimulated_rate(detuning) * stimulated_ + fixed_;
  matrix.generator.makeCompressed();
  return matrix;
}

RateMatrix build_rate_matrix(const SpectroscopyScenario& scenario, double detuning) {
  return RateModel(scenario).build(detuning);
}

// ---------------------------------------------------------------------------

namespace {

EvolutionResult finish(const GridBounds& grid, Eigen::VectorXd values, const EvolutionOptions& options) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < -options.negativity_tolerance) {
      throw NumericError("evolve: population entry " + std::to_string(i) + " went negative (" +
                         std::to_string(values[i]) + ")");
    }
    if (values[i] < 0.0) values[i] = 0.0;
  }
  EvolutionResult result{PopulationState::from_vector(grid, values), false};
  result.leak_warning = result.state.leaked() > options.leak_warning_threshold;
  return result;
}

void check_initial(const RateMatrix& matrix, const PopulationState& initial) {
  if (static_cast<Eigen::Index>(initial.dimension()) != matrix.dimension()) {
    throw std::invalid_argument("evolve: state and rate matrix dimensions differ");
  }
  const double total = initial.in_grid() + initial.leaked();
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("evolve: initial state is not normalized");
}

}  // namespace

EvolutionResult evolve(const RateMatrix& matrix, const PopulationState& initial, double duration,
                       const EvolutionOptions& options) {
  check_initial(matrix, initial);
  if (duration < 0.0) throw std::invalid_argument("evolve: duration must be non-negative");
  const Eigen::VectorXd p0 = initial.to_vector();
  if (duration == 0.0) return finish(matrix.grid, p0, options);
  if (options.method == EvolutionMethod::adaptive) {
    return finish(matrix.grid,
                  integrate_linear_adaptive(matrix.generator, p0, duration, options.absolute_tolerance,
                                            options.relative_tolerance),
                  options);
  }
  const Eigen::MatrixXd dense = Eigen::MatrixXd(matrix.generator) * duration;
  return finish(matrix.grid, matrix_exponential(dense) * p0, options);
}

std::vector<EvolutionResult> evolve_series(const RateMatrix& matrix, const PopulationState& initial,
                                           std::span<const double> times, const EvolutionOptions& options) {
  check_initial(matrix, initial);
  std::vector<EvolutionResult> results;
  results.reserve(times.size());
  Eigen::VectorXd p = initial.to_vector();
  const Eigen::MatrixXd dense = Eigen::MatrixXd(matrix.generator);
  double now = 0.0;
  double cached_step = -1.0;
  Eigen::MatrixXd propagator;
  for (const double t : times) {
    if (t < now) throw std::invalid_argument("evolve_series: times must be ascending and non-negative");
    const double step = t - now;
    if (step > 0.0) {
      if (options.method == EvolutionMethod::adaptive) {
        p = integrate_linear_adaptive(matrix.generator, p, step, options.absolute_tolerance,
                                      options.relative_tolerance);
      } else {
        if (cached_step < 0.0 || std::abs(step - cached_step) > 1e-12 * step) {
          propagator = matrix_exponential(dense * step);
          cached_step = step;
        }
        p = propagator * p;
      }
    }
    now = t;
    results.push_back(finish(matrix.grid, p, options));
    p = results.back().state.to_vector();
  }
  return results;
}

double scaled_time(double tau_spec, const SpectroscopyScenario& scenario) {
  return tau_spec * base_rate(scenario.laser, scenario.line, 0.0, Channel::absorption, scenario.regime);
}

double spectroscopy_time(double tau_scaled, const SpectroscopyScenario& scenario) {
  const double rate = base_rate(scenario.laser, scenario.line, 0.0, Channel::absorption, scenario.regime);
  if (!(rate > 0.0)) throw std::domain_error("spectroscopy_time: resonant absorption rate is zero");
  return tau_scaled / rate;
}

}  // namespace prs
