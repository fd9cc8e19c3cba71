#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "prs/rate_engine.hpp"
#include "prs/readout.hpp"

namespace prs {

struct SpectrumRecord {
  double detuning = 0.0;  // rad/s
  double p_gr = 1.0;
  PopulationState state;
  bool leak_warning = false;

  double marginal(int n_ip, int n_op) const { return state.marginal(n_ip, n_op); }
  double leaked() const { return state.leaked(); }
};

struct ScanOptions {
  unsigned threads = 0;  // 0: one per hardware thread
  EvolutionOptions evolution{};
};

/// Evolves the motional ground state for tau_spec at every detuning and reads
/// it out.
std::vector<SpectrumRecord> readout_spectrum(const RateModel& model, std::span<const double> detunings,
                                             double tau_spec, const ReadoutConfig& readout,
                                             const ScanOptions& options = {});
std::vector<SpectrumRecord> readout_spectrum(const SpectroscopyScenario& scenario,
                                             std::span<const double> detunings, double tau_spec,
                                             const ReadoutConfig& readout, const ScanOptions& options = {});

/// One spectrum per pulse duration, indexed [tau][detuning]. Durations must
/// ascend; equally spaced durations share a single propagator per detuning.
std::vector<std::vector<SpectrumRecord>> readout_spectra(const RateModel& model,
                                                         std::span<const double> detunings,
                                                         std::span<const double> taus_spec,
                                                         const ReadoutConfig& readout,
                                                         const ScanOptions& options = {});

/// Symmetric grid of `points` detunings spanning [-half_span, half_span].
std::vector<double> detuning_grid(double half_span, int points);

/// P(x) = baseline - depth (w/2)^2 / ((x - center)^2 + (w/2)^2)
struct LorentzianParams {
  double baseline = 1.0;
  double depth = 0.0;
  double center = 0.0;
  double fwhm = 1.0;

  double operator()(double x) const;
};

struct FitResult {
  double center = 0.0;    // rad/s
  double fwhm = 0.0;      // rad/s
  double depth = 0.0;
  double baseline = 0.0;
  double residual_norm = 0.0;
  std::array<double, 4> variance{};  // baseline, depth, center, fwhm
  int iterations = 0;

  LorentzianParams params() const { return {baseline, depth, center, fwhm}; }
};

/// Levenberg-Marquardt fit of a Lorentzian dip. Starts from `initial` when
/// given, otherwise from guesses read off the data. Throws NumericError for
/// flat data or when the iteration cap is reached.
FitResult fit_lorentzian(std::span<const double> x, std::span<const double> y,
                         std::optional<LorentzianParams> initial = std::nullopt);
FitResult fit_lorentzian(const std::vector<SpectrumRecord>& records);

struct DipMeasure {
  double fwhm = 0.0;
  double depth = 0.0;
  double baseline = 0.0;
  double center = 0.0;  // grid minimum
};

/// Model-free width and depth. The baseline is the median of the outer 10 %
/// of points; crossings of the half-depth level are linearly interpolated.
/// Throws NumericError when a crossing lies outside the scanned range.
DipMeasure numeric_fwhm_depth(std::span<const double> x, std::span<const double> y);
DipMeasure numeric_fwhm_depth(const std::vector<SpectrumRecord>& records);

struct WidthDepthPoint {
  double tau_scaled = 0.0;
  double tau_spec = 0.0;  // s
  std::optional<FitResult> fit;
  std::optional<DipMeasure> numeric;
  double max_leak = 0.0;
  bool leak_warning = false;
};

/// FWHM and depth against scaled time for one scenario. Points where a
/// measure could not be taken leave it empty.
std::vector<WidthDepthPoint> width_depth_curve(const RateModel& model, std::span<const double> detunings,
                                               std::span<const double> taus_scaled, const ReadoutConfig& readout,
                                               const ScanOptions& options = {});

std::vector<std::vector<WidthDepthPoint>> width_depth_curves(std::span<const SpectroscopyScenario> scenarios,
                                                             std::span<const double> detunings,
                                                             std::span<const double> taus_scaled,
                                                             const ReadoutConfig& readout,
                                                             const ScanOptions& options = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace prs
