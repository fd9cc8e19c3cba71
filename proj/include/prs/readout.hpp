#pragma once

#include "prs/coupling.hpp"
#include "prs/ion_mechanics.hpp"
#include "prs/rate_engine.hpp"

namespace prs {

/// Sideband pulse on the readout ion.
struct ReadoutPulse {
  SidebandOrder sideband{0, -1};
  double omega_0_r = 0.0;  // carrier Rabi frequency, rad/s
  double duration = 0.0;   // s
  double detuning = 0.0;   // from the sideband, rad/s
  LambDicke eta{};         // readout ion
};

/// pi / Omega for `reference` driven on `sideband`; the default is the
/// (0,1) -> (0,0) red sideband of the out-of-phase mode.
double pi_time(double omega_0_r, const LambDicke& eta, MotionalIndex reference = {0, 1},
               SidebandOrder sideband = {0, -1});

/// Resonant pi pulse on `sideband`, timed on `reference`.
ReadoutPulse make_pi_pulse(double omega_0_r, const LambDicke& eta, SidebandOrder sideband,
                           MotionalIndex reference);

struct ReadoutOptions {
  // survival of population outside the grid; 1/2 is the high-n average of cos^2
  double leak_survival = 0.5;
};

/// Probability that the readout ion is shelved, summed over motional states.
double shelving_probability(const PopulationState& state, const ReadoutPulse& pulse,
                            const ReadoutOptions& options = {});

/// Probability to stay in the bright ground state. Resonant pulses take a
/// direct cos^2 route; detuned pulses go through shelving_probability.
double fluorescence_probability(const PopulationState& state, const ReadoutPulse& pulse,
                                const ReadoutOptions& options = {});

/// Out-of-phase pulse followed by in-phase pulse; shelved population is not
/// touched by the second pulse.
double two_pulse_fluorescence(const PopulationState& state, const ReadoutPulse& pulse_op,
                              const ReadoutPulse& pulse_ip, const ReadoutOptions& options = {});

/// How a spectrum is read out.
struct ReadoutConfig {
  double omega_0_r = 0.0;  // rad/s
  BeamGeometry beam{};     // readout laser, seen by the readout ion
  bool two_pulse = false;
  ReadoutOptions options{};
};

/// The detection signal P_gr for `state` with pulses timed from `config`.
class ReadoutModel {
 public:
  ReadoutModel(const TwoIonSystem& system, const ReadoutConfig& config);

  double signal(const PopulationState& state) const;

  const ReadoutPulse& pulse_op() const { return pulse_op_; }
  const ReadoutPulse& pulse_ip() const { return pulse_ip_; }
  const ReadoutConfig& config() const { return config_; }

 private:
  ReadoutConfig config_;
  ReadoutPulse pulse_op_;
  ReadoutPulse pulse_ip_;
};

}  // namespace prs
