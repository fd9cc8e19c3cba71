// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
// Takes a few minutes; the spectra use the full preset grids.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include "prs/config.hpp"
#include "prs/constants.hpp"
#include "prs/coupling.hpp"
#include "prs/radiation.hpp"
#include "prs/readout.hpp"
#include "prs/scan_fit.hpp"

using namespace prs;
using constants::angular;
using constants::hertz;

namespace {

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("criterion %-3s %s  %s\n", id.c_str(), pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool within(double value, double target, double rel) { return std::abs(value / target - 1.0) <= rel; }

ScenarioConfig preset(const std::string& name, const std::vector<std::string>& overrides = {}) {
  return load_config("", overrides, name);
}

// Independent single-mode coupling: the factorial double sum, in long double.
std::complex<long double> xi_sum(long double eta, int n, int s) {
  const int lo = std::min(n, n + s);
  const int hi = std::max(n, n + s);
  const int a = std::abs(s);
  std::complex<long double> total = 0;
  for (int m = 0; m <= lo; ++m) {
    const long double log_mag = (2 * m + a) * std::log(eta) + 0.5L * (std::lgamma((long double)lo + 1) + std::lgamma((long double)hi + 1)) -
                                std::lgamma((long double)m + 1) - std::lgamma((long double)m + a + 1) -
                                std::lgamma((long double)lo - m + 1);
    // (i eta)^(2m + |s|) = i^|s| (-1)^m eta^(2m + |s|)
    const long double sign = m % 2 == 0 ? 1.0L : -1.0L;
    total += sign * std::exp(log_mag);
  }
  std::complex<long double> phase = 1;
  for (int k = 0; k < a; ++k) phase *= std::complex<long double>(0, 1);
  return total * phase * std::exp(-eta * eta / 2);
}

std::vector<double> scaled_grid(double step, int count) {
  std::vector<double> t;
  for (int k = 1; k <= count; ++k) t.push_back(step * k);
  return t;
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  return x.size() < 3 ? 0.0 : linear_fit(x, y).r_squared;
}

void criterion_1() {
  const auto mg = preset("mg24_ca40").scenario.system.modes();
  const auto mgh = preset("mgh24_ca40").scenario.system.modes();
  const bool ok = within(hertz(mg.in_phase), 162.9e3, 1e-3) && within(hertz(mg.out_of_phase), 300.2e3, 1e-3) &&
                  within(hertz(mgh.in_phase), 162.0e3, 1e-3) && within(hertz(mgh.out_of_phase), 295.7e3, 1e-3);
  report("1", ok,
         fmt("modes %.2f/%.2f kHz (Mg), %.2f/%.2f kHz (MgH)", hertz(mg.in_phase) / 1e3, hertz(mg.out_of_phase) / 1e3,
             hertz(mgh.in_phase) / 1e3, hertz(mgh.out_of_phase) / 1e3));
}

void criterion_2() {
  const auto mg = preset("mg24_ca40").scenario;
  const auto mgh = preset("mgh24_ca40").scenario;
  const LambDicke axial = lamb_dicke(mg.system, {mg.line.wavelength(), 1.0}, IonRole::target);
  const LambDicke beam = mg.laser_lamb_dicke();
  const LambDicke readout = lamb_dicke(mg.system, {729e-9, 1.0}, IonRole::readout);
  const LambDicke mgh_beam = mgh.laser_lamb_dicke();
  const LambDicke mgh_readout = lamb_dicke(mgh.system, {729e-9, 1.0}, IonRole::readout);
  const std::vector<std::pair<double, double>> pairs{
      {axial.ip, 0.42},       {axial.op, 0.51},         {beam.ip, 0.30},          {beam.op, 0.36},
      {readout.ip, 0.204},    {readout.op, 0.0917},     {mgh_beam.ip, 0.0136},    {mgh_beam.op, 0.0159},
      {mgh_readout.ip, 0.203}, {mgh_readout.op, 0.0949}};
  double worst = 0.0;
  for (const auto& [value, target] : pairs) worst = std::max(worst, std::abs(value / target - 1.0));
  report("2", worst <= 0.02, fmt("ten Lamb-Dicke parameters, worst relative deviation %.3f", worst));
}

void criterion_3() {
  const auto mg = preset("mg24_ca40").scenario;
  const auto mgh = preset("mgh24_ca40").scenario;
  const double i_t = effective_saturation_intensity(mg.line, mg.laser, SpectralRegime::transition_limited);
  const double i_l = effective_saturation_intensity(mgh.line, mgh.laser, SpectralRegime::laser_limited);
  report("3", within(i_t, 0.749e4, 0.01) && within(i_l, 3.40, 0.01),
         fmt("I_sat %.4f W/cm^2 (Mg), %.4f W/m^2 (MgH, 50 MHz laser)", i_t / 1e4, i_l));
}

void criterion_4() {
  const auto mg = preset("mg24_ca40").scenario;
  const auto mgh = preset("mgh24_ca40").scenario;
  bool ok = true;
  std::string detail = "tau_scaled";
  const std::vector<std::pair<double, double>> mg_cases{{1.3e-3, 2.23}, {3.6e-3, 6.2}, {5.3e-3, 9.10}};
  for (const auto& [t, target] : mg_cases) {
    const double v = scaled_time(t, mg);
    ok = ok && within(v, target, 0.02);
    detail += fmt(" %.3f", v);
  }
  const std::vector<std::pair<double, double>> mgh_cases{{10e-3, 3280}, {50e-3, 16400}};
  for (const auto& [t, target] : mgh_cases) {
    const double v = scaled_time(t, mgh);
    ok = ok && within(v, target, 0.02);
    detail += fmt(" %.0f", v);
  }
  report("4", ok, detail);
}

void criterion_5() {
  const auto shape = composite_target_lineshape(angular(41.8e6), angular(3e6), angular(6.1e6));
  report("5", within(hertz(shape.fwhm()), 42.5e6, 0.02), fmt("composite FWHM %.3f MHz", hertz(shape.fwhm()) / 1e6));
}

struct MgScan {
  std::vector<double> taus;
  std::vector<std::vector<SpectrumRecord>> spectra;
  std::vector<FitResult> fits;
};

MgScan mg_scan() {
  const auto cfg = preset("mg24_ca40");
  const RateModel model(cfg.scenario);
  MgScan scan;
  // 9.10 is the last point, the first few feed the extrapolation
  scan.taus = scaled_grid(0.455, 20);
  std::vector<double> times;
  for (double t : scan.taus) times.push_back(spectroscopy_time(t, cfg.scenario));
  const auto x = detuning_grid(angular(150e6), 101);
  scan.spectra = readout_spectra(model, x, times, cfg.readout);
  for (const auto& s : scan.spectra) scan.fits.push_back(fit_lorentzian(s));
  return scan;
}

struct MghCurve {
  std::vector<double> taus;
  std::vector<DipMeasure> dips;
  std::vector<bool> leak;
};

MghCurve mgh_curve(const std::vector<std::string>& overrides, double half_span, const std::vector<double>& taus) {
  const auto cfg = preset("mgh24_ca40", overrides);
  const RateModel model(cfg.scenario);
  std::vector<double> times;
  for (double t : taus) times.push_back(spectroscopy_time(t, cfg.scenario));
  const auto spectra = readout_spectra(model, detuning_grid(half_span, 101), times, cfg.readout);
  MghCurve curve;
  curve.taus = taus;
  for (const auto& s : spectra) {
    curve.dips.push_back(numeric_fwhm_depth(s));
    curve.leak.push_back(std::any_of(s.begin(), s.end(), [](const SpectrumRecord& r) { return r.leak_warning; }));
  }
  return curve;
}

void criterion_6(const MgScan& mg) {
  const std::vector<double> x(mg.taus.begin(), mg.taus.begin() + 4);
  std::vector<double> y;
  for (int k = 0; k < 4; ++k) y.push_back(hertz(mg.fits[k].fwhm));
  const double mg_limit = linear_fit(x, y).intercept;
  bool ok = within(mg_limit, 41.8e6, 0.05);
  std::string detail = fmt("Mg %.2f MHz;", mg_limit / 1e6);

  for (double width : {10e6, 50e6, 100e6}) {
    const auto curve = mgh_curve({"laser.fwhm_hz=" + std::to_string(width)}, angular(5 * width), scaled_grid(100, 4));
    std::vector<double> w;
    for (const auto& d : curve.dips) w.push_back(hertz(d.fwhm));
    const double limit = linear_fit(curve.taus, w).intercept;
    ok = ok && within(limit, width, 0.20);
    detail += fmt(" MgH %.0f -> %.2f MHz;", width / 1e6, limit / 1e6);
  }
  report("6", ok, detail);
}

void criterion_7a() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"mg24_ca40", "mgh24_ca40"}) {
    const auto cfg = preset(name);
    const RateModel model(cfg.scenario);
    std::vector<double> times;
    const int points = 60;
    for (int k = 1; k <= points; ++k) times.push_back(cfg.scan.duration * k / points);
    const auto series = evolve_series(model.build(0.0), PopulationState::motional_ground(cfg.scenario.grid), times);
    double previous = 1.0;
    double worst_rise = 0.0;
    for (const auto& r : series) {
      const double p = r.state.marginal(0, 0);
      worst_rise = std::max(worst_rise, p - previous);
      previous = p;
    }
    ok = ok && worst_rise <= 1e-12;
    detail += std::string(name) + fmt(" P(0,0) end %.4f, largest rise %.1e; ", previous, worst_rise);
  }
  report("7a", ok, detail);
}

void criterion_7b(const MgScan& mg) {
  const auto& spectrum = mg.spectra.back();
  const std::size_t mid = spectrum.size() / 2;
  double lowest_other = 1.0;
  double p01_max = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (i != mid) lowest_other = std::min(lowest_other, spectrum[i].p_gr);
    p01_max = std::max(p01_max, spectrum[i].marginal(0, 1));
  }
  const double center = spectrum[mid].p_gr;
  const double p01_center = spectrum[mid].marginal(0, 1);
  const bool ok = center <= lowest_other && p01_center < p01_max;
  report("7b", ok,
         fmt("tau_scaled %.2f: P_gr(0) %.4f vs lowest elsewhere %.4f;", mg.taus.back(), center, lowest_other) +
             fmt(" P(0,1) center %.4f vs max %.4f", p01_center, p01_max));
}

void criterion_7c(const MgScan& mg) {
  std::vector<double> x;
  std::vector<double> w;
  std::vector<double> depth;
  for (std::size_t k = 0; k < mg.taus.size(); ++k) {
    x.push_back(mg.taus[k]);
    w.push_back(mg.fits[k].fwhm);
    depth.push_back(mg.fits[k].depth);
  }
  const auto saturating = [](const std::vector<double>& d) {
    const std::size_t q = d.size() / 4;
    const double early = d[q] - d[0];
    const double late = d.back() - d[d.size() - 1 - q];
    return d.back() < 1.0 && late < early && late >= -1e-3;
  };
  const bool mg_width_up = std::is_sorted(w.begin(), w.end());
  const double mg_r2 = r_squared(x, w);
  bool ok = mg_width_up && mg_r2 > 0.95 && saturating(depth);
  std::string detail = fmt("Mg FWHM %.1f->%.1f MHz R^2 %.4f, depth %.3f->", hertz(w.front()) / 1e6, hertz(w.back()) / 1e6,
                           mg_r2, depth.front()) +
                       fmt("%.3f;", depth.back());

  const auto cfg = preset("mgh24_ca40");
  const auto curve = mgh_curve({}, cfg.scan.half_span, cfg.scan.taus_scaled);
  std::vector<double> hw;
  std::vector<double> hd;
  std::vector<double> valid_x;
  std::vector<double> valid_w;
  for (std::size_t k = 0; k < curve.taus.size(); ++k) {
    hw.push_back(curve.dips[k].fwhm);
    hd.push_back(curve.dips[k].depth);
    if (!curve.leak[k]) {
      valid_x.push_back(curve.taus[k]);
      valid_w.push_back(curve.dips[k].fwhm);
    }
  }
  const bool mgh_width_up = std::is_sorted(hw.begin(), hw.end());
  const double mgh_r2 = r_squared(valid_x, valid_w);
  const double depth_max = *std::max_element(hd.begin(), hd.end());
  const bool mgh_depth = depth_max < 1.0 && hd.back() - hd[hd.size() * 3 / 4] < hd[hd.size() / 4] - hd.front();
  ok = ok && mgh_width_up && mgh_r2 > 0.95 && mgh_depth;
  detail += fmt(" MgH FWHM %.1f->%.1f MHz monotone %.0f, R^2 %.4f", hertz(hw.front()) / 1e6, hertz(hw.back()) / 1e6,
                mgh_width_up ? 1.0 : 0.0, mgh_r2) +
            fmt(" over %.0f leak-free points, depth max %.3f", static_cast<double>(valid_x.size()), depth_max);
  report("7c", ok, detail);
}

void criterion_7d() {
  const auto cfg = preset("mg24_ca40", {"laser.intensity_saturation_fraction=1.3e-5", "scan.tau_spec_s=1.6e-3"});
  const RateModel model(cfg.scenario);
  const auto x = detuning_grid(angular(150e6), 101);
  const auto records = readout_spectrum(model, x, cfg.scan.tau_spec, cfg.readout);
  ReadoutConfig single = cfg.readout;
  single.two_pulse = false;
  ReadoutConfig pair = cfg.readout;
  pair.two_pulse = true;
  const ReadoutModel one(cfg.scenario.system, single);
  const ReadoutModel two(cfg.scenario.system, pair);
  std::vector<double> y1;
  std::vector<double> y2;
  for (const auto& r : records) {
    y1.push_back(one.signal(r.state));
    y2.push_back(two.signal(r.state));
  }
  const double d1 = fit_lorentzian(x, y1).depth;
  const double d2 = fit_lorentzian(x, y2).depth;
  const double gain = d2 / d1 - 1.0;
  report("7d", gain >= 0.30 && gain <= 0.70,
         fmt("depth %.4f single, %.4f two-pulse, increase %.1f %%", d1, d2, 100 * gain));
}

void criterion_8(const MgScan& mg) {
  double xi_err = 0.0;
  for (long double eta : {0.05L, 0.2973L, 0.5085L, 1.0L}) {
    for (int n = 0; n <= 25; ++n)
      for (int s = -6; s <= 6; ++s) {
        if (n + s < 0) continue;
        const auto reference = xi_sum(eta, n, s);
        const auto value = xi({static_cast<double>(eta), 0.0}, {n, 0}, {s, 0});
        xi_err = std::max(xi_err, static_cast<double>(std::abs(std::complex<long double>(value.real(), value.imag()) - reference)));
      }
  }

  double xi_sum_err = 0.0;
  for (double eta : {0.2973, 0.5085}) {
    for (int n = 0; n <= 10; ++n) {
      double total = 0.0;
      for (int s = -n; s <= 80; ++s) total += std::norm(xi({eta, 0.0}, {n, 0}, {s, 0}));
      xi_sum_err = std::max(xi_sum_err, std::abs(total - 1.0));
    }
  }

  const auto cfg = preset("mg24_ca40");
  const auto& sc = cfg.scenario;
  const EmissionTable d = emission_coefficients(sc.pattern, sc.line, sc.system, 5, 5, 14, 14);
  double d_err = 0.0;
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; b <= 5; ++b) {
      double total = 0.0;
      for (int s = -a; s <= 14; ++s)
        for (int t = -b; t <= 14; ++t) total += d({a, b}, {s, t});
      d_err = std::max(d_err, std::abs(total - 1.0));
    }

  double route_err = 0.0;
  for (const char* name : {"mg24_ca40", "mgh24_ca40"}) {
    auto small = preset(name).scenario;
    small.grid = {7, 7};
    const RateModel model(small);
    const double tau = spectroscopy_time(name == std::string("mg24_ca40") ? 2.0 : 2000.0, small);
    EvolutionOptions adaptive;
    adaptive.method = EvolutionMethod::adaptive;
    for (double delta : {0.0, angular(30e6)}) {
      const auto m = model.build(delta);
      const auto p0 = PopulationState::motional_ground(small.grid);
      const auto a = evolve(m, p0, tau).state.to_vector();
      const auto b = evolve(m, p0, tau, adaptive).state.to_vector();
      route_err = std::max(route_err, (a - b).cwiseAbs().maxCoeff());
    }
  }

  double conservation = 0.0;
  for (const auto& spectrum : mg.spectra)
    for (const auto& r : spectrum) conservation = std::max(conservation, std::abs(r.state.in_grid() + r.leaked() - 1.0));

  const bool ok = xi_err <= 1e-10 && xi_sum_err <= 1e-6 && d_err <= 1e-5 && route_err <= 1e-8 && conservation <= 1e-7;
  report("8", ok,
         fmt("xi vs sum %.1e, sum|xi|^2 %.1e, sum D %.1e, adaptive vs expm %.1e", xi_err, xi_sum_err, d_err, route_err) +
             fmt(", conservation %.1e", conservation));
}

void criterion_9() {
  double worst = 0.0;
  for (const char* name : {"mg24_ca40", "mgh24_ca40"}) {
    const auto base = preset(name, {"heating.ip_per_s=0", "heating.op_per_s=0", "emission.enabled=false"});
    SpectroscopyScenario doubled = base.scenario;
    doubled.laser.intensity *= 2.0;
    const RateModel one(base.scenario);
    const RateModel two(doubled);
    const double tau = base.scan.tau_spec;
    const double width = std::max(base.scenario.laser.fwhm, base.scenario.line.gamma_t);
    for (double delta : {0.0, 0.5 * width, 1.5 * width}) {
      const auto p0 = PopulationState::motional_ground(base.scenario.grid);
      const auto a = evolve(one.build(delta), p0, tau).state.to_vector();
      const auto b = evolve(two.build(delta), p0, tau / 2).state.to_vector();
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
  }
  report("9", worst <= 1e-6, fmt("largest population difference %.1e", worst));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  const MgScan mg = mg_scan();
  criterion_6(mg);
  criterion_7a();
  criterion_7b(mg);
  criterion_7c(mg);
  criterion_7d();
  criterion_8(mg);
  criterion_9();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d failing criteria, %.0f s\n", failures, seconds);
  return failures == 0 ? 0 : 1;
}
