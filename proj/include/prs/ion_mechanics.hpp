#pragma once

#include <string>

namespace prs {

struct IonSpecies {
  std::string label;
  double mass_u = 0.0;  // unified atomic mass units

  double mass_kg() const;
};

/// Singly charged ion built from a neutral-atom mass.
IonSpecies singly_charged(std::string label, double atomic_mass_u);

struct ModeFrequencies {
  double in_phase = 0.0;      // rad/s
  double out_of_phase = 0.0;  // rad/s
};

/// Mass-weighted eigenvector components of the two axial modes. The pair
/// (readout, target) of each mode is normalized to unit length.
struct ModeVectors {
  double ip_readout = 0.0;
  double ip_target = 0.0;
  double op_readout = 0.0;
  double op_target = 0.0;
};

/// Axial normal-mode frequencies of a two-ion crystal of singly charged
/// ions. `mass_ratio` is m_target / m_readout and `omega_z` the axial
/// frequency of a lone readout ion in the same trap.
ModeFrequencies mode_frequencies(double mass_ratio, double omega_z);

ModeVectors mode_eigenvectors(double mass_ratio);

class TwoIonSystem {
 public:
  TwoIonSystem(IonSpecies target, IonSpecies readout, double omega_z);

  const IonSpecies& target() const { return target_; }
  const IonSpecies& readout() const { return readout_; }
  double omega_z() const { return omega_z_; }
  double mass_ratio() const { return target_.mass_u / readout_.mass_u; }
  const ModeFrequencies& modes() const { return modes_; }
  const ModeVectors& vectors() const { return vectors_; }

 private:
  IonSpecies target_;
  IonSpecies readout_;
  double omega_z_;
  ModeFrequencies modes_;
  ModeVectors vectors_;
};

struct BeamGeometry {
  double wavelength = 0.0;        // m
  double axial_projection = 1.0;  // |k_hat . z_hat|
};

enum class IonRole { target, readout };

struct LambDicke {
  double ip = 0.0;
  double op = 0.0;
};

/// eta_mode = k * projection * |b_mode,ion| * sqrt(hbar / (2 m_ion omega_mode)).
LambDicke lamb_dicke(const TwoIonSystem& system, const BeamGeometry& beam, IonRole ion);

}  // namespace prs
