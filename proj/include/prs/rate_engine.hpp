#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <span>
#include <vector>

#include "prs/coupling.hpp"
#include "prs/ion_mechanics.hpp"
#include "prs/radiation.hpp"

namespace prs {

struct GridBounds {
  int n_ip_max = 19;
  int n_op_max = 19;
};

struct SidebandLimits {
  int ip = 5;
  int op = 6;
};

struct HeatingRates {
  double ip = 0.0;  // 1/s
  double op = 0.0;  // 1/s
};

struct SpectroscopyScenario {
  TwoIonSystem system;
  TransitionLine line;
  LaserField laser;
  BeamGeometry beam;  // spectroscopy beam seen by the target ion
  EmissionPattern pattern = EmissionPattern::isotropic();
  GridBounds grid{};
  SidebandLimits sidebands{};
  HeatingRates heating{};
  SpectralRegime regime = SpectralRegime::automatic;
  bool spontaneous_emission = true;
  double leak_warning_threshold = 0.01;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  LambDicke laser_lamb_dicke() const { return lamb_dicke(system, beam, IonRole::target); }
};

enum class InternalState { ground = 0, excited = 1 };

/// Probabilities over (target internal state) x (n_ip, n_op) plus the
/// population that has left the truncated motional grid.
class PopulationState {
 public:
  explicit PopulationState(GridBounds grid);

  /// Everything in `internal` with both modes in their ground state.
  static PopulationState motional_ground(GridBounds grid, InternalState internal = InternalState::ground);
  static PopulationState from_vector(GridBounds grid, const Eigen::VectorXd& values);

  double& at(InternalState internal, int n_ip, int n_op) { return values_[index(internal, n_ip, n_op)]; }
  double at(InternalState internal, int n_ip, int n_op) const { return values_[index(internal, n_ip, n_op)]; }
  /// Motional population summed over the target internal state.
  double marginal(int n_ip, int n_op) const;
  double& leaked() { return values_.back(); }
  double leaked() const { return values_.back(); }
  /// In-grid probability.
  double in_grid() const;

  const GridBounds& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  Eigen::VectorXd to_vector() const;
  std::size_t dimension() const { return values_.size(); }

  std::size_t index(InternalState internal, int n_ip, int n_op) const {
    return (static_cast<std::size_t>(internal) * (grid_.n_ip_max + 1) + n_ip) * (grid_.n_op_max + 1) + n_op;
  }

 private:
  GridBounds grid_;
  std::vector<double> values_;
};

/// Generator G of dp/dt = G p over the grid states plus one absorbing leak
/// state (last index). Off-diagonal entries are rates, columns sum to zero.
struct RateMatrix {
  GridBounds grid;
  Eigen::SparseMatrix<double> generator;

  Eigen::Index dimension() const { return generator.rows(); }
};

/// Detuning-independent parts of the rate equations for one scenario: the
/// coupling and emission tables and the unit-rate generators they imply.
class RateModel {
 public:
  explicit RateModel(const SpectroscopyScenario& scenario);

  RateMatrix build(double detuning) const;

  double absorption_rate(double detuning) const;
  double stimulated_rate(double detuning) const;

  const SpectroscopyScenario& scenario() const { return scenario_; }
  const CouplingTable& coupling() const { return coupling_; }
  const EmissionTable& emission() const { return emission_; }

 private:
  SpectroscopyScenario scenario_;
  CouplingTable coupling_;
  EmissionTable emission_;
  Eigen::SparseMatrix<double> absorption_;
  Eigen::SparseMatrix<double> stimulated_;
  Eigen::SparseMatrix<double> fixed_;  // spontaneous emission and heating
};

RateMatrix build_rate_matrix(const SpectroscopyScenario& scenario, double detuning);

enum class EvolutionMethod { matrix_exponential, adaptive };

struct EvolutionOptions {
  EvolutionMethod method = EvolutionMethod::matrix_exponential;
  double absolute_tolerance = 1e-12;  // adaptive stepping only
  double relative_tolerance = 1e-10;  // adaptive stepping only
  double negativity_tolerance = 1e-10;
  double leak_warning_threshold = 0.01;
};

struct EvolutionResult {
  PopulationState state;
  bool leak_warning = false;
};

/// p(t) = exp(G t) p(0). Throws NumericError when an entry comes out below
/// -negativity_tolerance; smaller negative round-off is clipped to zero.
EvolutionResult evolve(const RateMatrix& matrix, const PopulationState& initial, double duration,
                       const EvolutionOptions& options = {});

/// States at each of the ascending `times`, reusing the step propagator
/// whenever consecutive intervals coincide.
std::vector<EvolutionResult> evolve_series(const RateMatrix& matrix, const PopulationState& initial,
                                           std::span<const double> times, const EvolutionOptions& options = {});

/// Pulse duration times the resonant absorption base rate.
double scaled_time(double tau_spec, const SpectroscopyScenario& scenario);

/// Inverse of scaled_time.
double spectroscopy_time(double tau_scaled, const SpectroscopyScenario& scenario);

}  // namespace prs
