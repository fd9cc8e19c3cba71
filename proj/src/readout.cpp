#include "prs/readout.hpp"

#include <cmath>
#include <stdexcept>

#include "prs/constants.hpp"

namespace prs {

namespace {

double rabi_frequency(const ReadoutPulse& pulse, int n_ip, int n_op) {
  if (n_ip + pulse.sideband.ip < 0 || n_op + pulse.sideband.op < 0) return 0.0;
  return rabi(pulse.omega_0_r, xi(pulse.eta, {n_ip, n_op}, pulse.sideband));
}

// Detuned red-sideband shelving for a single motional state.
double shelved(double omega, const ReadoutPulse& pulse) {
  if (omega == 0.0) return 0.0;
  const double generalized = std::hypot(omega, pulse.detuning);
  const double s = std::sin(generalized * pulse.duration / 2.0);
  return omega * omega / (generalized * generalized) * s * s;
}

void check(const ReadoutPulse& pulse, const ReadoutOptions& options) {
  if (pulse.duration < 0.0) throw std::invalid_argument("readout pulse duration must be non-negative");
  if (options.leak_survival < 0.0 || options.leak_survival > 1.0) {
    throw std::invalid_argument("leak_survival must lie in [0, 1]");
  }
}

}  // namespace

double pi_time(double omega_0_r, const LambDicke& eta, MotionalIndex reference, SidebandOrder sideband) {
  const double omega = rabi(omega_0_r, xi(eta, reference, sideband));
  if (!(omega > 0.0)) throw std::domain_error("pi_time: reference sideband has zero coupling");
  const double tau = constants::pi / omega;
  if (!std::isfinite(tau)) throw std::domain_error("pi_time: reference sideband coupling underflows");
  return tau;
}

ReadoutPulse make_pi_pulse(double omega_0_r, const LambDicke& eta, SidebandOrder sideband,
                           MotionalIndex reference) {
  return ReadoutPulse{sideband, omega_0_r, pi_time(omega_0_r, eta, reference, sideband), 0.0, eta};
}

double shelving_probability(const PopulationState& state, const ReadoutPulse& pulse,
                            const ReadoutOptions& options) {
  check(pulse, options);
  const GridBounds& grid = state.grid();
  double total = 0.0;
  for (int a = 0; a <= grid.n_ip_max; ++a)
    for (int b = 0; b <= grid.n_op_max; ++b) {
      const double p = state.marginal(a, b);
      if (p != 0.0) total += p * shelved(rabi_frequency(pulse, a, b), pulse);
    }
  return total + state.leaked() * (1.0 - options.leak_survival);
}

double fluorescence_probability(const PopulationState& state, const ReadoutPulse& pulse,
                                const ReadoutOptions& options) {
  if (pulse.detuning != 0.0) return 1.0 - shelving_probability(state, pulse, options);
  check(pulse, options);
  const GridBounds& grid = state.grid();
  double total = 0.0;
  for (int a = 0; a <= grid.n_ip_max; ++a)
    for (int b = 0; b <= grid.n_op_max; ++b) {
      const double p = state.marginal(a, b);
      if (p == 0.0) continue;
      const double c = std::cos(rabi_frequency(pulse, a, b) * pulse.duration / 2.0);
      total += p * c * c;
    }
  return total + state.leaked() * options.leak_survival;
}

double two_pulse_fluorescence(const PopulationState& state, const ReadoutPulse& pulse_op,
                              const ReadoutPulse& pulse_ip, const ReadoutOptions& options) {
  check(pulse_op, options);
  check(pulse_ip, options);
  const GridBounds& grid = state.grid();
  double total = 0.0;
  for (int a = 0; a <= grid.n_ip_max; ++a)
    for (int b = 0; b <= grid.n_op_max; ++b) {
      const double p = state.marginal(a, b);
      if (p == 0.0) continue;
      const double survive_op = 1.0 - shelved(rabi_frequency(pulse_op, a, b), pulse_op);
      const double survive_ip = 1.0 - shelved(rabi_frequency(pulse_ip, a, b), pulse_ip);
      total += p * survive_op * survive_ip;
    }
  return total + state.leaked() * options.leak_survival * options.leak_survival;
}

ReadoutModel::ReadoutModel(const TwoIonSystem& system, const ReadoutConfig& config) : config_(config) {
  if (!(config.omega_0_r > 0.0)) throw std::invalid_argument("readout.rabi_frequency: must be positive");
  const LambDicke eta = lamb_dicke(system, config.beam, IonRole::readout);
  pulse_op_ = make_pi_pulse(config.omega_0_r, eta, {0, -1}, {0, 1});
  if (config.two_pulse) pulse_ip_ = make_pi_pulse(config.omega_0_r, eta, {-1, 0}, {1, 0});
}

double ReadoutModel::signal(const PopulationState& state) const {
  if (config_.two_pulse) return two_pulse_fluorescence(state, pulse_op_, pulse_ip_, config_.options);
  return fluorescence_probability(state, pulse_op_, config_.options);
}

}  // namespace prs
