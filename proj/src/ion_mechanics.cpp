#include "prs/ion_mechanics.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "prs/constants.hpp"

namespace prs {

double IonSpecies::mass_kg() const { return mass_u * constants::atomic_mass_unit; }

IonSpecies singly_charged(std::string label, double atomic_mass_u) {
  return IonSpecies{std::move(label), atomic_mass_u - constants::electron_mass_u};
}

ModeFrequencies mode_frequencies(double mass_ratio, double omega_z) {
  if (!(mass_ratio > 0.0) || !(omega_z > 0.0)) {
    throw std::domain_error("mode_frequencies: mass ratio and omega_z must be positive");
  }
  const double inv = 1.0 / mass_ratio;
  const double root = std::sqrt(1.0 - inv + inv * inv);
  return ModeFrequencies{omega_z * std::sqrt(1.0 + inv - root),
                         omega_z * std::sqrt(1.0 + inv + root)};
}

ModeVectors mode_eigenvectors(double mass_ratio) {
  if (!(mass_ratio > 0.0)) {
    throw std::domain_error("mode_eigenvectors: mass ratio must be positive");
  }
  const double mu = mass_ratio;
  const double root = std::sqrt(mu * mu - mu + 1.0);
  const double sqrt_mu = std::sqrt(mu);
  const double r_ip = (1.0 - mu + root) / sqrt_mu;
  const double r_op = (1.0 - mu - root) / sqrt_mu;
  const double n_ip = std::sqrt(1.0 + r_ip * r_ip);
  const double n_op = std::sqrt(1.0 + r_op * r_op);
  return ModeVectors{r_ip / n_ip, 1.0 / n_ip, r_op / n_op, 1.0 / n_op};
}

TwoIonSystem::TwoIonSystem(IonSpecies target, IonSpecies readout, double omega_z)
    : target_(std::move(target)), readout_(std::move(readout)), omega_z_(omega_z) {
  if (!(target_.mass_u > 0.0) || !(readout_.mass_u > 0.0)) {
    throw std::domain_error("TwoIonSystem: ion masses must be positive");
  }
  modes_ = mode_frequencies(mass_ratio(), omega_z_);
  vectors_ = mode_eigenvectors(mass_ratio());
}

LambDicke lamb_dicke(const TwoIonSystem& system, const BeamGeometry& beam, IonRole ion) {
  if (!(beam.wavelength > 0.0)) {
    throw std::domain_error("lamb_dicke: wavelength must be positive");
  }
  const bool target = ion == IonRole::target;
  const double mass = target ? system.target().mass_kg() : system.readout().mass_kg();
  const ModeVectors& b = system.vectors();
  const double b_ip = std::abs(target ? b.ip_target : b.ip_readout);
  const double b_op = std::abs(target ? b.op_target : b.op_readout);
  const double k = constants::two_pi / beam.wavelength * beam.axial_projection;
  const auto spread = [&](double omega) {
    return std::sqrt(constants::hbar / (2.0 * mass * omega));
  };
  return LambDicke{k * b_ip * spread(system.modes().in_phase),
                   k * b_op * spread(system.modes().out_of_phase)};
}

}  // namespace prs
