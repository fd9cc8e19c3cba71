#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "prs/coupling.hpp"
#include "prs/ion_mechanics.hpp"

namespace prs {

enum class LineShape { lorentzian, gaussian };

/// Area-normalized lineshape density (1/(rad/s)); `fwhm` is the full width
/// at half maximum for both shapes.
double lineshape_value(LineShape shape, double omega, double center, double fwhm);

/// Gaussian sigma from its FWHM.
double sigma_from_fwhm(double fwhm);

struct TransitionLine {
  double omega_t = 0.0;           // rad/s
  double gamma_t = 0.0;           // rad/s, natural decay rate
  double absorption_scale = 1.0;  // level-structure factor on absorption
  double stimulated_scale = 1.0;  // level-structure factor on stimulated emission

  double wavelength() const;
  static TransitionLine from_wavelength(double wavelength, double gamma_t, double absorption_scale = 1.0,
                                        double stimulated_scale = 1.0);
};

enum class LaserShape { gaussian, delta };

/// Spectroscopy light. Its center is given separately as a detuning
/// delta_t = omega_L - omega_t wherever it matters.
struct LaserField {
  double intensity = 0.0;  // W/m^2
  double fwhm = 0.0;       // rad/s
  LaserShape shape = LaserShape::delta;

  double sigma() const { return sigma_from_fwhm(fwhm); }
};

enum class SpectralRegime { automatic, transition_limited, laser_limited, general };

/// Picks the limit used for the effective spectral density. A delta laser
/// is always transition limited; otherwise a width ratio below 1e-3 selects
/// the corresponding limit and anything else uses the full convolution.
SpectralRegime resolve_regime(const LaserField& laser, const TransitionLine& line,
                              SpectralRegime requested = SpectralRegime::automatic);

enum class VoigtPath { automatic, lorentzian_substitution, gaussian_substitution };

/// Integral over omega of L_lorentz(omega; 0, gamma) G(omega; offset, sigma).
double voigt_convolution(double offset, double gamma, double sigma, VoigtPath path = VoigtPath::automatic);

/// rho_eff(omega_t, omega_L) in J s / m^3.
double effective_spectral_density(const LaserField& laser, const TransitionLine& line, double detuning,
                                  SpectralRegime regime = SpectralRegime::automatic);

/// Einstein B coefficient (identical for absorption and stimulated emission).
double einstein_b(const TransitionLine& line);

/// Two-level saturation intensity (W/m^2) in the transition- or
/// laser-limited regime. Level-structure scales are not applied.
double saturation_intensity(const TransitionLine& line, const LaserField& laser, SpectralRegime regime);

/// Saturation intensity seen by the absorption channel: the two-level value
/// divided by the line's absorption scale.
double effective_saturation_intensity(const TransitionLine& line, const LaserField& laser, SpectralRegime regime);

enum class Channel { absorption, stimulated };

/// R_abs/stim,0 = B rho_eff * channel scale, in 1/s.
double base_rate(const LaserField& laser, const TransitionLine& line, double detuning, Channel channel,
                 SpectralRegime regime = SpectralRegime::automatic);

/// Spontaneous emission angular distribution W(theta, phi), normalized over
/// the sphere. theta is measured from the trap axis z and phi from y in the
/// xy plane.
class EmissionPattern {
 public:
  enum class Kind { mg_mixed, isotropic, pi, sigma, custom };

  static EmissionPattern mg_mixed();
  static EmissionPattern isotropic();
  /// Pure pi (Delta m = 0) pattern for a quantization axis along y.
  static EmissionPattern pi();
  /// Pure sigma (Delta m = +-1) pattern for a quantization axis along y.
  static EmissionPattern sigma();
  static EmissionPattern custom(std::function<double(double, double)> weight, std::string name = "custom");
  /// Looks up a built-in pattern by name; throws std::invalid_argument.
  static EmissionPattern from_name(const std::string& name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double operator()(double theta, double phi) const;

 private:
  EmissionPattern(Kind kind, std::string name, std::function<double(double, double)> weight = {});

  Kind kind_;
  std::string name_;
  std::function<double(double, double)> weight_;
};

double emission_weight(const EmissionPattern& pattern, double theta, double phi);

struct SphereQuadrature {
  int polar_order = 32;      // Gauss-Legendre nodes in cos(theta)
  int azimuth_points = 64;   // trapezoid points in phi
  int max_polar_order = 1024;
  double tolerance = 1e-6;   // relative change allowed on refinement
};

/// Solid-angle averaged sideband strengths D(n, s) for spontaneous emission.
class EmissionTable {
 public:
  EmissionTable() = default;
  EmissionTable(int n_ip_max, int n_op_max, int s_ip_max, int s_op_max);

  double operator()(MotionalIndex n, SidebandOrder s) const { return values_[index(n, s)]; }
  double& at(MotionalIndex n, SidebandOrder s) { return values_[index(n, s)]; }

  int n_ip_max() const { return n_ip_max_; }
  int n_op_max() const { return n_op_max_; }
  int s_ip_max() const { return s_ip_max_; }
  int s_op_max() const { return s_op_max_; }
  int polar_order_used() const { return polar_order_used_; }
  void set_polar_order_used(int order) { polar_order_used_ = order; }

  /// Columns n_ip, n_op, s_ip, s_op, D (all dimensionless); rows where n + s is negative are skipped.
  void write_csv(std::ostream& out) const;

 private:
  std::size_t index(MotionalIndex n, SidebandOrder s) const {
    return ((static_cast<std::size_t>(n.ip) * (n_op_max_ + 1) + n.op) * (2 * s_ip_max_ + 1) + s.ip + s_ip_max_) *
               (2 * s_op_max_ + 1) +
           s.op + s_op_max_;
  }

  int n_ip_max_ = 0;
  int n_op_max_ = 0;
  int s_ip_max_ = 0;
  int s_op_max_ = 0;
  int polar_order_used_ = 0;
  std::vector<double> values_;
};

/// D table for Lamb-Dicke parameters `axial_eta` of a photon emitted along z;
/// a photon at polar angle theta sees axial_eta * cos(theta). Doubles the
/// quadrature until successive tables agree; throws NumericError otherwise.
EmissionTable emission_coefficients(const EmissionPattern& pattern, const LambDicke& axial_eta, int n_ip_max,
                                    int n_op_max, int s_ip_max, int s_op_max,
                                    const SphereQuadrature& quadrature = {});

/// Same, with the spontaneous Lamb-Dicke parameters of the target ion at the
/// line's wavelength.
EmissionTable emission_coefficients(const EmissionPattern& pattern, const TransitionLine& line,
                                    const TwoIonSystem& system, int n_ip_max, int n_op_max, int s_ip_max,
                                    int s_op_max, const SphereQuadrature& quadrature = {});

/// Target line as seen through Doppler broadening and a two-component
/// Zeeman splitting: the mean of two Voigt profiles at +-splitting/2.
class CompositeLineshape {
 public:
  CompositeLineshape(double gamma_t, double doppler_fwhm, double zeeman_splitting);

  double operator()(double detuning) const;
  double fwhm() const { return fwhm_; }

 private:
  double component(double offset) const;

  double gamma_t_;
  double doppler_sigma_;
  double zeeman_splitting_;
  double fwhm_ = 0.0;
};

CompositeLineshape composite_target_lineshape(double gamma_t, double doppler_fwhm, double zeeman_splitting);

}  // namespace prs
