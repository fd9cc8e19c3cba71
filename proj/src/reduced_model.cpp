#include "prs/reduced_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prs {

ReducedModel::ReducedModel(const SpectroscopyScenario& scenario) : scenario_(scenario) {
  scenario_.validate();
  const SidebandLimits sb = scenario_.sidebands;
  const CouplingTable coupling(scenario_.laser_lamb_dicke(), 0, 0, sb.ip, sb.op);
  const bool spontaneous = scenario_.spontaneous_emission && scenario_.line.gamma_t > 0.0;
  EmissionTable emission;
  if (spontaneous) emission = emission_coefficients(scenario_.pattern, scenario_.line, scenario_.system, 0, 0, sb.ip, sb.op);
  for (int s = 0; s <= sb.ip; ++s)
    for (int t = 0; t <= sb.op; ++t) {
      const double strength = coupling.strength({0, 0}, {s, t});
      const double d = spontaneous ? emission({0, 0}, {s, t}) : 0.0;
      if (s == 0 && t == 0) {
        carrier_ = strength;
        emission_carrier_ = d;
      } else {
        sidebands_ += strength;
        emission_sidebands_ += d;
      }
    }
}

ReducedRates ReducedModel::rates(double detuning) const {
  const double r_abs = base_rate(scenario_.laser, scenario_.line, detuning, Channel::absorption, scenario_.regime);
  const double r_stim = base_rate(scenario_.laser, scenario_.line, detuning, Channel::stimulated, scenario_.regime);
  const double gamma = scenario_.spontaneous_emission ? scenario_.line.gamma_t : 0.0;
  const double heating = scenario_.heating.ip + scenario_.heating.op;
  ReducedRates rates;
  rates.g0_to_e0 = r_abs * carrier_;
  rates.e0_to_g0 = r_stim * carrier_ + gamma * emission_carrier_;
  rates.g0_to_aux = r_abs * sidebands_ + heating;
  rates.e0_to_aux = r_stim * sidebands_ + gamma * emission_sidebands_ + heating;
  return rates;
}

ReducedRates reduced_rates(const SpectroscopyScenario& scenario, double detuning) {
  return ReducedModel(scenario).rates(detuning);
}

ThreeLevelState evolve_reduced(const ReducedRates& rates, const ThreeLevelState& initial, double duration) {
  if (duration < 0.0) throw std::invalid_argument("evolve_reduced: duration must be non-negative");
  // d/dt (g, e) = M (g, e); aux takes whatever leaves.
  const double m11 = -(rates.g0_to_e0 + rates.g0_to_aux);
  const double m12 = rates.e0_to_g0;
  const double m21 = rates.g0_to_e0;
  const double m22 = -(rates.e0_to_g0 + rates.e0_to_aux);
  const double mean = 0.5 * (m11 + m22);
  const double half_gap = 0.5 * (m11 - m22);
  const double q = std::sqrt(half_gap * half_gap + m12 * m21);
  const double t = duration;

  // exp(M t) = e^{mean t} [cosh(q t) I + sinh(q t)/q (M - mean I)]
  double c;
  double s_over_q;
  double scale;
  if (q * t < 1e-4) {
    scale = std::exp(mean * t);
    c = 1.0 + 0.5 * (q * t) * (q * t);
    s_over_q = t * (1.0 + (q * t) * (q * t) / 6.0);
  } else {
    // e^{mean t} cosh(q t) written without overflow
    const double fast = std::exp((mean + q) * t);
    const double slow = std::exp((mean - q) * t);
    scale = 1.0;
    c = 0.5 * (fast + slow);
    s_over_q = 0.5 * (fast - slow) / q;
  }
  const double e11 = scale * (c + s_over_q * half_gap);
  const double e22 = scale * (c - s_over_q * half_gap);
  const double e12 = scale * s_over_q * m12;
  const double e21 = scale * s_over_q * m21;

  ThreeLevelState out;
  out.p_g0 = std::max(0.0, e11 * initial.p_g0 + e12 * initial.p_e0);
  out.p_e0 = std::max(0.0, e21 * initial.p_g0 + e22 * initial.p_e0);
  out.p_aux = initial.p_aux + (initial.p_g0 + initial.p_e0 - out.p_g0 - out.p_e0);
  return out;
}

double reduced_signal(const ThreeLevelState& state, double kappa) {
  if (kappa < 0.0 || kappa > 1.0) throw std::invalid_argument("kappa must lie in [0, 1]");
  return state.p_g0 + state.p_e0 + (1.0 - kappa) * state.p_aux;
}

std::vector<ReducedRecord> reduced_spectrum(const ReducedModel& model, std::span<const double> detunings,
                                            double tau_spec, double kappa) {
  std::vector<ReducedRecord> records;
  records.reserve(detunings.size());
  for (const double delta : detunings) {
    const ThreeLevelState state = evolve_reduced(model.rates(delta), {}, tau_spec);
    records.push_back({delta, state, reduced_signal(state, kappa)});
  }
  return records;
}

}  // namespace prs
