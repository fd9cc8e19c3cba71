#include "prs/radiation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "prs/constants.hpp"
#include "prs/errors.hpp"
#include "prs/quadrature.hpp"

namespace prs {

using constants::hbar;
using constants::pi;
using constants::speed_of_light;

namespace {

constexpr double kRegimeRatio = 1e-3;
constexpr double kGaussianReach = 12.0;  // sigmas kept in convolution integrals
constexpr double kLorentzCore = 4.0;     // half widths treated with the tan substitution

double lorentzian(double x, double fwhm) {
  const double half = 0.5 * fwhm;
  return half / (pi * (x * x + half * half));
}

double gaussian(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (std::sqrt(2.0 * pi) * sigma);
}

}  // namespace

double sigma_from_fwhm(double fwhm) { return fwhm / std::sqrt(8.0 * std::log(2.0)); }

double lineshape_value(LineShape shape, double omega, double center, double fwhm) {
  if (!(fwhm > 0.0)) throw std::domain_error("lineshape_value: width must be positive");
  const double x = omega - center;
  return shape == LineShape::lorentzian ? lorentzian(x, fwhm) : gaussian(x, sigma_from_fwhm(fwhm));
}

double TransitionLine::wavelength() const { return constants::two_pi * speed_of_light / omega_t; }

TransitionLine TransitionLine::from_wavelength(double wavelength, double gamma_t, double absorption_scale,
                                               double stimulated_scale) {
  if (!(wavelength > 0.0)) throw std::domain_error("TransitionLine: wavelength must be positive");
  return TransitionLine{constants::two_pi * speed_of_light / wavelength, gamma_t, absorption_scale,
                        stimulated_scale};
}

SpectralRegime resolve_regime(const LaserField& laser, const TransitionLine& line, SpectralRegime requested) {
  const bool narrow_laser = laser.shape == LaserShape::delta || laser.fwhm == 0.0;
  if (narrow_laser && line.gamma_t == 0.0) {
    throw std::domain_error("effective spectral density: laser and transition widths are both zero");
  }
  if (requested != SpectralRegime::automatic) {
    if (requested != SpectralRegime::transition_limited && narrow_laser) {
      throw std::domain_error("effective spectral density: regime needs a finite laser width");
    }
    if (requested != SpectralRegime::laser_limited && line.gamma_t == 0.0) {
      throw std::domain_error("effective spectral density: regime needs a finite transition width");
    }
    return requested;
  }
  if (narrow_laser) return SpectralRegime::transition_limited;
  if (line.gamma_t == 0.0) return SpectralRegime::laser_limited;
  if (laser.fwhm <= kRegimeRatio * line.gamma_t) return SpectralRegime::transition_limited;
  if (line.gamma_t <= kRegimeRatio * laser.fwhm) return SpectralRegime::laser_limited;
  return SpectralRegime::general;
}

double voigt_convolution(double offset, double gamma, double sigma, VoigtPath path) {
  if (gamma < 0.0 || sigma < 0.0) throw std::domain_error("voigt_convolution: negative width");
  if (sigma == 0.0 && gamma == 0.0) throw std::domain_error("voigt_convolution: both widths zero");
  if (sigma == 0.0) return lorentzian(offset, gamma);
  if (gamma == 0.0) return gaussian(offset, sigma);
  if (path == VoigtPath::automatic) {
    path = 0.5 * gamma >= sigma ? VoigtPath::gaussian_substitution : VoigtPath::lorentzian_substitution;
  }
  const double half = 0.5 * gamma;
  if (path == VoigtPath::gaussian_substitution) {
    // omega = offset + sigma z; break at the Lorentzian peak when it lies inside.
    const auto integrand = [&](double z) {
      return std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi) * lorentzian(offset + sigma * z, gamma);
    };
    const double peak = -offset / sigma;
    if (peak > -kGaussianReach && peak < kGaussianReach) {
      return integrate_adaptive(integrand, -kGaussianReach, peak) +
             integrate_adaptive(integrand, peak, kGaussianReach);
    }
    return integrate_adaptive(integrand, -kGaussianReach, kGaussianReach);
  }
  // Break once per sigma. Inside the Lorentzian core omega = (gamma/2) tan t
  // flattens the peak; out on the wings plain omega is better conditioned.
  const double core = kLorentzCore * half;
  std::vector<double> breaks;
  const int reach = static_cast<int>(kGaussianReach);
  for (int j = -reach; j <= reach; ++j) breaks.push_back(offset + j * sigma);
  for (double b : {-core, 0.0, core}) {
    if (b > breaks.front() && b < breaks.back()) breaks.push_back(b);
  }
  std::sort(breaks.begin(), breaks.end());
  const auto in_t = [&](double t) { return gaussian(half * std::tan(t) - offset, sigma) / pi; };
  const auto in_omega = [&](double w) { return lorentzian(w, gamma) * gaussian(w - offset, sigma); };
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (b <= a) continue;
    if (a >= -core && b <= core) {
      sum += integrate_adaptive(in_t, std::atan(a / half), std::atan(b / half));
    } else {
      sum += integrate_adaptive(in_omega, a, b);
    }
  }
  return sum;
}

double effective_spectral_density(const LaserField& laser, const TransitionLine& line, double detuning,
                                  SpectralRegime regime) {
  const double prefactor = 3.0 * laser.intensity / speed_of_light;
  switch (resolve_regime(laser, line, regime)) {
    case SpectralRegime::transition_limited:
      return prefactor * lorentzian(detuning, line.gamma_t);
    case SpectralRegime::laser_limited:
      return prefactor * gaussian(detuning, laser.sigma());
    default:
      return prefactor * voigt_convolution(detuning, line.gamma_t, laser.sigma());
  }
}

double einstein_b(const TransitionLine& line) {
  const double w3 = line.omega_t * line.omega_t * line.omega_t;
  return pi * pi * std::pow(speed_of_light, 3) * line.gamma_t / (hbar * w3);
}

double saturation_intensity(const TransitionLine& line, const LaserField& laser, SpectralRegime regime) {
  const double w3 = line.omega_t * line.omega_t * line.omega_t;
  const double c2 = speed_of_light * speed_of_light;
  switch (regime) {
    case SpectralRegime::transition_limited:
      return hbar * w3 * line.gamma_t / (6.0 * pi * c2);
    case SpectralRegime::laser_limited:
      if (!(laser.fwhm > 0.0)) throw std::domain_error("saturation_intensity: laser width must be positive");
      return std::sqrt(2.0) * hbar * w3 * laser.sigma() / (3.0 * std::pow(pi, 1.5) * c2);
    default:
      throw std::invalid_argument("saturation_intensity: regime must be transition or laser limited");
  }
}

double effective_saturation_intensity(const TransitionLine& line, const LaserField& laser, SpectralRegime regime) {
  return saturation_intensity(line, laser, regime) / line.absorption_scale;
}

double base_rate(const LaserField& laser, const TransitionLine& line, double detuning, Channel channel,
                 SpectralRegime regime) {
  if (laser.intensity == 0.0) return 0.0;
  const double scale = channel == Channel::absorption ? line.absorption_scale : line.stimulated_scale;
  return einstein_b(line) * effective_spectral_density(laser, line, detuning, regime) * scale;
}

// ---------------------------------------------------------------------------
// Emission patterns

EmissionPattern::EmissionPattern(Kind kind, std::string name, std::function<double(double, double)> weight)
    : kind_(kind), name_(std::move(name)), weight_(std::move(weight)) {}

EmissionPattern EmissionPattern::mg_mixed() { return EmissionPattern(Kind::mg_mixed, "mg_mixed"); }
EmissionPattern EmissionPattern::isotropic() { return EmissionPattern(Kind::isotropic, "isotropic"); }
EmissionPattern EmissionPattern::pi() { return EmissionPattern(Kind::pi, "pi"); }
EmissionPattern EmissionPattern::sigma() { return EmissionPattern(Kind::sigma, "sigma"); }

EmissionPattern EmissionPattern::custom(std::function<double(double, double)> weight, std::string name) {
  if (!weight) throw std::invalid_argument("EmissionPattern::custom: empty weight function");
  return EmissionPattern(Kind::custom, std::move(name), std::move(weight));
}

EmissionPattern EmissionPattern::from_name(const std::string& name) {
  if (name == "mg_mixed") return mg_mixed();
  if (name == "isotropic") return isotropic();
  if (name == "pi") return pi();
  if (name == "sigma") return sigma();
  throw std::invalid_argument("unknown emission pattern '" + name + "'");
}

double EmissionPattern::operator()(double theta, double phi) const {
  // y component of the emission direction squared
  const double y = std::sin(theta) * std::sin(phi);
  const double y2 = y * y;
  const double w_pi = 3.0 / (8.0 * constants::pi) * (1.0 - y2);
  const double w_sigma = 3.0 / (16.0 * constants::pi) * (1.0 + y2);
  switch (kind_) {
    case Kind::mg_mixed: return 2.0 / 3.0 * w_pi + 1.0 / 3.0 * w_sigma;
    case Kind::isotropic: return 1.0 / (4.0 * constants::pi);
    case Kind::pi: return w_pi;
    case Kind::sigma: return w_sigma;
    case Kind::custom: return weight_(theta, phi);
  }
  return 0.0;
}

double emission_weight(const EmissionPattern& pattern, double theta, double phi) { return pattern(theta, phi); }

// ---------------------------------------------------------------------------
// Emission coefficient tables

EmissionTable::EmissionTable(int n_ip_max, int n_op_max, int s_ip_max, int s_op_max)
    : n_ip_max_(n_ip_max),
      n_op_max_(n_op_max),
      s_ip_max_(s_ip_max),
      s_op_max_(s_op_max),
      values_(static_cast<std::size_t>(n_ip_max + 1) * (n_op_max + 1) * (2 * s_ip_max + 1) * (2 * s_op_max + 1),
              0.0) {}

void EmissionTable::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision(17);
  out << "n_ip[1],n_op[1],s_ip[1],s_op[1],D[1]\n";
  for (int a = 0; a <= n_ip_max_; ++a)
    for (int b = 0; b <= n_op_max_; ++b)
      for (int s = -s_ip_max_; s <= s_ip_max_; ++s)
        for (int t = -s_op_max_; t <= s_op_max_; ++t) {
          if (a + s < 0 || b + t < 0) continue;
          out << a << ',' << b << ',' << s << ',' << t << ',' << (*this)({a, b}, {s, t}) << '\n';
        }
  out.precision(old_precision);
}

namespace {

EmissionTable integrate_table(const EmissionPattern& pattern, const LambDicke& axial_eta, int n_ip_max,
                              int n_op_max, int s_ip_max, int s_op_max, int polar_order, int azimuth_points) {
  EmissionTable table(n_ip_max, n_op_max, s_ip_max, s_op_max);
  const GaussLegendreRule rule = gauss_legendre(polar_order);
  const int ip_stride = 2 * s_ip_max + 1;
  const int op_stride = 2 * s_op_max + 1;
  std::vector<double> f_ip(static_cast<std::size_t>((n_ip_max + 1) * ip_stride));
  std::vector<double> f_op(static_cast<std::size_t>((n_op_max + 1) * op_stride));
  const double dphi = constants::two_pi / azimuth_points;

  for (int k = 0; k < polar_order; ++k) {
    const double u = rule.nodes[k];
    const double theta = std::acos(u);
    double azimuthal = 0.0;
    for (int j = 0; j < azimuth_points; ++j) azimuthal += pattern(theta, j * dphi);
    const double weight = rule.weights[k] * azimuthal * dphi;

    const auto fill = [u](std::vector<double>& f, double eta, int n_max, int s_max) {
      const int stride = 2 * s_max + 1;
      for (int n = 0; n <= n_max; ++n)
        for (int s = -s_max; s <= s_max; ++s) {
          const double v = n + s < 0 ? 0.0 : mode_factor(eta * u, n, s);
          f[n * stride + s + s_max] = v * v;
        }
    };
    fill(f_ip, axial_eta.ip, n_ip_max, s_ip_max);
    fill(f_op, axial_eta.op, n_op_max, s_op_max);

    for (int a = 0; a <= n_ip_max; ++a)
      for (int s = -s_ip_max; s <= s_ip_max; ++s) {
        const double wa = weight * f_ip[a * ip_stride + s + s_ip_max];
        if (wa == 0.0) continue;
        for (int b = 0; b <= n_op_max; ++b)
          for (int t = -s_op_max; t <= s_op_max; ++t) table.at({a, b}, {s, t}) += wa * f_op[b * op_stride + t + s_op_max];
      }
  }
  table.set_polar_order_used(polar_order);
  return table;
}

bool tables_agree(const EmissionTable& coarse, const EmissionTable& fine, double tolerance) {
  for (int a = 0; a <= fine.n_ip_max(); ++a)
    for (int b = 0; b <= fine.n_op_max(); ++b)
      for (int s = -fine.s_ip_max(); s <= fine.s_ip_max(); ++s)
        for (int t = -fine.s_op_max(); t <= fine.s_op_max(); ++t) {
          const double x = coarse({a, b}, {s, t});
          const double y = fine({a, b}, {s, t});
          if (std::abs(x - y) > tolerance * std::abs(y) + 1e-14) return false;
        }
  return true;
}

}  // namespace

EmissionTable emission_coefficients(const EmissionPattern& pattern, const LambDicke& axial_eta, int n_ip_max,
                                    int n_op_max, int s_ip_max, int s_op_max, const SphereQuadrature& quadrature) {
  if (n_ip_max < 0 || n_op_max < 0 || s_ip_max < 0 || s_op_max < 0) {
    throw std::invalid_argument("emission_coefficients: negative bounds");
  }
  int polar = quadrature.polar_order;
  int azimuth = quadrature.azimuth_points;
  EmissionTable coarse = integrate_table(pattern, axial_eta, n_ip_max, n_op_max, s_ip_max, s_op_max, polar, azimuth);
  while (2 * polar <= quadrature.max_polar_order) {
    polar *= 2;
    azimuth *= 2;
    EmissionTable fine = integrate_table(pattern, axial_eta, n_ip_max, n_op_max, s_ip_max, s_op_max, polar, azimuth);
    if (tables_agree(coarse, fine, quadrature.tolerance)) return fine;
    coarse = std::move(fine);
  }
  throw NumericError("emission_coefficients: solid-angle quadrature did not converge");
}

EmissionTable emission_coefficients(const EmissionPattern& pattern, const TransitionLine& line,
                                    const TwoIonSystem& system, int n_ip_max, int n_op_max, int s_ip_max,
                                    int s_op_max, const SphereQuadrature& quadrature) {
  const LambDicke axial = lamb_dicke(system, BeamGeometry{line.wavelength(), 1.0}, IonRole::target);
  return emission_coefficients(pattern, axial, n_ip_max, n_op_max, s_ip_max, s_op_max, quadrature);
}

// ---------------------------------------------------------------------------
// Composite lineshape

CompositeLineshape::CompositeLineshape(double gamma_t, double doppler_fwhm, double zeeman_splitting)
    : gamma_t_(gamma_t), doppler_sigma_(sigma_from_fwhm(doppler_fwhm)), zeeman_splitting_(zeeman_splitting) {
  if (gamma_t < 0.0 || doppler_fwhm < 0.0 || zeeman_splitting < 0.0) {
    throw std::domain_error("composite_target_lineshape: widths must be non-negative");
  }
  if (gamma_t == 0.0 && doppler_fwhm == 0.0) {
    throw std::domain_error("composite_target_lineshape: need a natural or Doppler width");
  }
  // Locate the maximum on a coarse grid, then refine by golden section.
  const double scale = gamma_t_ + 3.0 * doppler_fwhm;
  const double reach = 0.5 * zeeman_splitting_ + scale;
  const int points = 400;
  double best_x = 0.0;
  double best = (*this)(0.0);
  for (int i = 0; i <= points; ++i) {
    const double x = -reach + 2.0 * reach * i / points;
    const double v = (*this)(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  const double cell = 2.0 * reach / points;
  double a = best_x - cell;
  double b = best_x + cell;
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 200 && b - a > 1e-13 * scale; ++i) {
    const double c = b - golden * (b - a);
    const double d = a + golden * (b - a);
    if ((*this)(c) >= (*this)(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  const double peak_x = 0.5 * (a + b);
  const double half = 0.5 * std::max((*this)(peak_x), best);

  const auto crossing = [&](double direction) {
    double inside = peak_x;
    double step = 0.05 * scale;
    double outside = peak_x + direction * step;
    while ((*this)(outside) > half) {
      inside = outside;
      step *= 1.5;
      outside += direction * step;
    }
    for (int i = 0; i < 200 && std::abs(outside - inside) > 1e-13 * scale; ++i) {
      const double mid = 0.5 * (inside + outside);
      if ((*this)(mid) > half) {
        inside = mid;
      } else {
        outside = mid;
      }
    }
    return 0.5 * (inside + outside);
  };
  fwhm_ = crossing(1.0) - crossing(-1.0);
}

double CompositeLineshape::component(double offset) const {
  return voigt_convolution(offset, gamma_t_, doppler_sigma_);
}

double CompositeLineshape::operator()(double detuning) const {
  const double half_split = 0.5 * zeeman_splitting_;
  return 0.5 * (component(detuning - half_split) + component(detuning + half_split));
}

CompositeLineshape composite_target_lineshape(double gamma_t, double doppler_fwhm, double zeeman_splitting) {
  return CompositeLineshape(gamma_t, doppler_fwhm, zeeman_splitting);
}

}  // namespace prs
