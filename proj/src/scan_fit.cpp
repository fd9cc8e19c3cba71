#include "prs/scan_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "prs/errors.hpp"
#include "prs/parallel.hpp"

namespace prs {

std::vector<std::vector<SpectrumRecord>> readout_spectra(const RateModel& model,
                                                         std::span<const double> detunings,
                                                         std::span<const double> taus_spec,
                                                         const ReadoutConfig& readout,
                                                         const ScanOptions& options) {
  const SpectroscopyScenario& scenario = model.scenario();
  const ReadoutModel reader(scenario.system, readout);
  EvolutionOptions evolution = options.evolution;
  evolution.leak_warning_threshold = scenario.leak_warning_threshold;
  const PopulationState initial = PopulationState::motional_ground(scenario.grid);

  std::vector<std::vector<SpectrumRecord>> spectra(
      taus_spec.size(), std::vector<SpectrumRecord>(detunings.size(), SpectrumRecord{0.0, 1.0, initial, false}));
  parallel_for(detunings.size(), options.threads, [&](std::size_t j) {
    const double delta = detunings[j];
    const auto states = evolve_series(model.build(delta), initial, taus_spec, evolution);
    for (std::size_t k = 0; k < states.size(); ++k) {
      spectra[k][j] = SpectrumRecord{delta, reader.signal(states[k].state), states[k].state, states[k].leak_warning};
    }
  });
  return spectra;
}

std::vector<SpectrumRecord> readout_spectrum(const RateModel& model, std::span<const double> detunings,
                                             double tau_spec, const ReadoutConfig& readout,
                                             const ScanOptions& options) {
  const double taus[] = {tau_spec};
  return std::move(readout_spectra(model, detunings, taus, readout, options).front());
}

std::vector<SpectrumRecord> readout_spectrum(const SpectroscopyScenario& scenario,
                                             std::span<const double> detunings, double tau_spec,
                                             const ReadoutConfig& readout, const ScanOptions& options) {
  return readout_spectrum(RateModel(scenario), detunings, tau_spec, readout, options);
}

std::vector<double> detuning_grid(double half_span, int points) {
  if (points < 2 || !(half_span > 0.0)) throw std::invalid_argument("detuning grid needs >= 2 points and a positive span");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[i] = -half_span + 2.0 * half_span * i / (points - 1);
  if (points % 2 == 1) grid[points / 2] = 0.0;
  return grid;
}

// ---------------------------------------------------------------------------

double LorentzianParams::operator()(double x) const {
  const double hw = fwhm / 2.0;
  const double dx = x - center;
  return baseline - depth * hw * hw / (dx * dx + hw * hw);
}

namespace {

std::vector<double> xs_of(const std::vector<SpectrumRecord>& records) {
  std::vector<double> x;
  x.reserve(records.size());
  for (const auto& r : records) x.push_back(r.detuning);
  return x;
}

std::vector<double> ys_of(const std::vector<SpectrumRecord>& records) {
  std::vector<double> y;
  y.reserve(records.size());
  for (const auto& r : records) y.push_back(r.p_gr);
  return y;
}

// Half-level crossing walking outward from `from`; nullopt if the edge is hit first.
std::optional<double> crossing(std::span<const double> x, std::span<const double> y, std::size_t from, int step,
                               double level) {
  auto i = static_cast<std::ptrdiff_t>(from);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  while (true) {
    const std::ptrdiff_t next = i + step;
    if (next < 0 || next >= n) return std::nullopt;
    if (y[next] >= level) {
      const double t = (level - y[i]) / (y[next] - y[i]);
      return x[i] + t * (x[next] - x[i]);
    }
    i = next;
  }
}

void check_xy(std::span<const double> x, std::span<const double> y, std::size_t minimum) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y differ in length");
  if (x.size() < minimum) throw std::invalid_argument("too few points: need " + std::to_string(minimum));
  if (!std::is_sorted(x.begin(), x.end())) throw std::invalid_argument("detunings must be ascending");
}

}  // namespace

FitResult fit_lorentzian(std::span<const double> x, std::span<const double> y,
                         std::optional<LorentzianParams> initial) {
  check_xy(x, y, 8);
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*hi - *lo < 1e-12) throw NumericError("fit_lorentzian: data are flat");

  LorentzianParams guess;
  if (initial) {
    guess = *initial;
  } else {
    const auto imin = static_cast<std::size_t>(lo - y.begin());
    guess.baseline = *hi;
    guess.center = x[imin];
    guess.depth = *hi - *lo;
    const double level = *hi - guess.depth / 2.0;
    const auto left = crossing(x, y, imin, -1, level);
    const auto right = crossing(x, y, imin, +1, level);
    if (left && right) {
      guess.fwhm = *right - *left;
    } else if (left || right) {
      guess.fwhm = 2.0 * std::abs((left ? *left : *right) - guess.center);
    } else {
      guess.fwhm = (x.back() - x.front()) / 4.0;
    }
    if (!(guess.fwhm > 0.0)) guess.fwhm = (x.back() - x.front()) / 4.0;
  }

  // Work in detuning measured from the initial center in units of the initial width.
  const double x0 = guess.center;
  const double scale = std::abs(guess.fwhm) > 0.0 ? std::abs(guess.fwhm) : 1.0;
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd u(n);
  Eigen::VectorXd data(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u[i] = (x[i] - x0) / scale;
    data[i] = y[i];
  }
  Eigen::Vector4d p(guess.baseline, guess.depth, 0.0, guess.fwhm / scale);

  auto residuals = [&](const Eigen::Vector4d& q) {
    const LorentzianParams model{q[0], q[1], q[2], q[3]};
    Eigen::VectorXd r(n);
    for (Eigen::Index i = 0; i < n; ++i) r[i] = model(u[i]) - data[i];
    return r;
  };
  auto jacobian = [&](const Eigen::Vector4d& q) {
    Eigen::MatrixXd j(n, 4);
    for (int k = 0; k < 4; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(q[k]));
      Eigen::Vector4d up = q;
      Eigen::Vector4d down = q;
      up[k] += h;
      down[k] -= h;
      j.col(k) = (residuals(up) - residuals(down)) / (2.0 * h);
    }
    return j;
  };

  constexpr int kMaxIterations = 200;
  double lambda = 1e-3;
  Eigen::VectorXd r = residuals(p);
  double cost = r.squaredNorm();
  int iteration = 0;
  bool converged = cost == 0.0;
  while (!converged && iteration < kMaxIterations) {
    ++iteration;
    const Eigen::MatrixXd j = jacobian(p);
    const Eigen::Matrix4d jtj = j.transpose() * j;
    const Eigen::Vector4d gradient = j.transpose() * r;
    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix4d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
      const Eigen::Vector4d step = a.ldlt().solve(-gradient);
      const Eigen::Vector4d trial = p + step;
      const Eigen::VectorXd trial_r = residuals(trial);
      const double trial_cost = trial_r.squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const double relative_step = (step.cwiseAbs().array() / (p.cwiseAbs().array() + 1e-12)).maxCoeff();
        const double relative_drop = (cost - trial_cost) / std::max(cost, 1e-300);
        p = trial;
        r = trial_r;
        cost = trial_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (relative_step < 1e-12 || relative_drop < 1e-15 || cost == 0.0) converged = true;
      } else {
        lambda *= 10.0;
        // No descent direction left at machine precision: we are at the minimum.
        if (lambda > 1e14) {
          converged = true;
          break;
        }
      }
    }
  }
  if (!converged) throw NumericError("fit_lorentzian: no convergence after 200 iterations");
  if (!(p[3] != 0.0)) throw NumericError("fit_lorentzian: width collapsed to zero");

  FitResult fit;
  fit.baseline = p[0];
  fit.depth = p[1];
  fit.center = x0 + p[2] * scale;
  fit.fwhm = std::abs(p[3]) * scale;
  fit.residual_norm = std::sqrt(cost);
  fit.iterations = iteration;
  if (n > 4) {
    const Eigen::MatrixXd j = jacobian(p);
    const Eigen::Matrix4d jtj = j.transpose() * j;
    const double s2 = cost / static_cast<double>(n - 4);
    Eigen::FullPivLU<Eigen::Matrix4d> lu(jtj);
    if (lu.isInvertible()) {
      const Eigen::Vector4d diag = s2 * lu.inverse().diagonal();
      fit.variance = {diag[0], diag[1], diag[2] * scale * scale, diag[3] * scale * scale};
    } else {
      fit.variance.fill(std::numeric_limits<double>::infinity());
    }
  }
  return fit;
}

FitResult fit_lorentzian(const std::vector<SpectrumRecord>& records) {
  const auto x = xs_of(records);
  const auto y = ys_of(records);
  return fit_lorentzian(x, y);
}

DipMeasure numeric_fwhm_depth(std::span<const double> x, std::span<const double> y) {
  check_xy(x, y, 5);
  const std::size_t n = x.size();
  const std::size_t edge = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * n)));
  std::vector<double> outer;
  for (std::size_t i = 0; i < edge; ++i) {
    outer.push_back(y[i]);
    outer.push_back(y[n - 1 - i]);
  }
  std::sort(outer.begin(), outer.end());
  const std::size_t m = outer.size();
  const double baseline = m % 2 == 1 ? outer[m / 2] : 0.5 * (outer[m / 2 - 1] + outer[m / 2]);

  const auto imin = static_cast<std::size_t>(std::min_element(y.begin(), y.end()) - y.begin());
  DipMeasure dip;
  dip.baseline = baseline;
  dip.depth = baseline - y[imin];
  dip.center = x[imin];
  if (!(dip.depth > 0.0)) throw NumericError("numeric_fwhm_depth: no dip below the baseline");
  const double level = baseline - dip.depth / 2.0;
  const auto left = crossing(x, y, imin, -1, level);
  const auto right = crossing(x, y, imin, +1, level);
  if (!left || !right) {
    throw NumericError("numeric_fwhm_depth: half-depth crossing outside the scanned range; widen the scan");
  }
  dip.fwhm = *right - *left;
  return dip;
}

DipMeasure numeric_fwhm_depth(const std::vector<SpectrumRecord>& records) {
  const auto x = xs_of(records);
  const auto y = ys_of(records);
  return numeric_fwhm_depth(x, y);
}

// ---------------------------------------------------------------------------

std::vector<WidthDepthPoint> width_depth_curve(const RateModel& model, std::span<const double> detunings,
                                               std::span<const double> taus_scaled, const ReadoutConfig& readout,
                                               const ScanOptions& options) {
  std::vector<double> taus_spec;
  taus_spec.reserve(taus_scaled.size());
  for (const double t : taus_scaled) taus_spec.push_back(spectroscopy_time(t, model.scenario()));
  const auto spectra = readout_spectra(model, detunings, taus_spec, readout, options);

  std::vector<WidthDepthPoint> curve;
  curve.reserve(spectra.size());
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    WidthDepthPoint point;
    point.tau_scaled = taus_scaled[k];
    point.tau_spec = taus_spec[k];
    for (const auto& record : spectra[k]) {
      point.max_leak = std::max(point.max_leak, record.leaked());
      point.leak_warning = point.leak_warning || record.leak_warning;
    }
    try {
      point.fit = fit_lorentzian(spectra[k]);
    } catch (const NumericError&) {
    }
    try {
      point.numeric = numeric_fwhm_depth(spectra[k]);
    } catch (const NumericError&) {
    }
    curve.push_back(point);
  }
  return curve;
}

std::vector<std::vector<WidthDepthPoint>> width_depth_curves(std::span<const SpectroscopyScenario> scenarios,
                                                             std::span<const double> detunings,
                                                             std::span<const double> taus_scaled,
                                                             const ReadoutConfig& readout,
                                                             const ScanOptions& options) {
  std::vector<std::vector<WidthDepthPoint>> curves;
  curves.reserve(scenarios.size());
  for (const auto& scenario : scenarios) {
    curves.push_back(width_depth_curve(RateModel(scenario), detunings, taus_scaled, readout, options));
  }
  return curves;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: x values are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return fit;
}

}  // namespace prs
