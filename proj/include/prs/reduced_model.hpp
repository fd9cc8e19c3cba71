#pragma once

#include <span>
#include <vector>

#include "prs/rate_engine.hpp"

namespace prs {

/// Populations of the three-level picture: target ground and excited with
/// both modes cold, and everything motionally excited lumped into aux.
struct ThreeLevelState {
  double p_g0 = 1.0;
  double p_e0 = 0.0;
  double p_aux = 0.0;
};

struct ReducedRates {
  double g0_to_e0 = 0.0;   // 1/s
  double e0_to_g0 = 0.0;
  double g0_to_aux = 0.0;
  double e0_to_aux = 0.0;
};

class ReducedModel {
 public:
  explicit ReducedModel(const SpectroscopyScenario& scenario);

  ReducedRates rates(double detuning) const;

  double carrier_strength() const { return carrier_; }
  /// Sum of |xi|^2 over the non-carrier sidebands from (0,0).
  double sideband_strength() const { return sidebands_; }
  double carrier_emission() const { return emission_carrier_; }
  double sideband_emission() const { return emission_sidebands_; }
  const SpectroscopyScenario& scenario() const { return scenario_; }

 private:
  SpectroscopyScenario scenario_;
  double carrier_ = 0.0;
  double sidebands_ = 0.0;
  double emission_carrier_ = 0.0;
  double emission_sidebands_ = 0.0;
};

ReducedRates reduced_rates(const SpectroscopyScenario& scenario, double detuning);

/// Closed-form solution of the three-level rate equations (aux absorbing).
ThreeLevelState evolve_reduced(const ReducedRates& rates, const ThreeLevelState& initial, double duration);

/// Readout signal with contrast kappa applied to the aux population.
double reduced_signal(const ThreeLevelState& state, double kappa = 0.5);

struct ReducedRecord {
  double detuning = 0.0;  // rad/s
  ThreeLevelState state;
  double p_gr = 1.0;
};

std::vector<ReducedRecord> reduced_spectrum(const ReducedModel& model, std::span<const double> detunings,
                                            double tau_spec, double kappa = 0.5);

}  // namespace prs
