#include "prs/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "prs/config.hpp"
#include "prs/constants.hpp"
#include "prs/errors.hpp"
#include "prs/reduced_model.hpp"
#include "prs/scan_fit.hpp"

namespace prs {

namespace {

using constants::hertz;

// Marginals P(n_ip, n_op) written to CSVs: the corner n <= this bound.
constexpr int kLeadingMarginals = 4;

struct Outputs {
  std::filesystem::path directory;
  std::string prefix;

  std::filesystem::path path(const std::string& suffix) const { return directory / (prefix + suffix); }

  std::ofstream open(const std::string& suffix) const {
    std::ofstream file(path(suffix));
    if (!file) throw ConfigError("output.directory: cannot write " + path(suffix).string());
    file << std::setprecision(12);
    return file;
  }
};

Outputs prepare_outputs(const ScenarioConfig& config) {
  Outputs outputs{config.output.directory, config.output.prefix};
  std::error_code ec;
  std::filesystem::create_directories(outputs.directory, ec);
  if (ec) throw ConfigError("output.directory: " + ec.message());
  return outputs;
}

void write_effective_config(const ScenarioConfig& config, const Outputs& outputs) {
  auto file = outputs.open("_config.json");
  file << config.document.dump(2) << '\n';
}

int marginal_bound(int n_max) { return std::min(n_max, kLeadingMarginals); }

void marginal_header(std::ostream& out, const GridBounds& grid) {
  for (int a = 0; a <= marginal_bound(grid.n_ip_max); ++a)
    for (int b = 0; b <= marginal_bound(grid.n_op_max); ++b) out << ",P_" << a << '_' << b << "[1]";
}

void marginal_row(std::ostream& out, const PopulationState& state) {
  const GridBounds& grid = state.grid();
  for (int a = 0; a <= marginal_bound(grid.n_ip_max); ++a)
    for (int b = 0; b <= marginal_bound(grid.n_op_max); ++b) out << ',' << state.marginal(a, b);
}

Json fit_json(const FitResult& fit) {
  return Json{{"center_hz", hertz(fit.center)},
              {"fwhm_hz", hertz(fit.fwhm)},
              {"depth", fit.depth},
              {"baseline", fit.baseline},
              {"residual_norm", fit.residual_norm},
              {"variance",
               {{"baseline", fit.variance[0]},
                {"depth", fit.variance[1]},
                {"center_hz2", fit.variance[2] / (constants::two_pi * constants::two_pi)},
                {"fwhm_hz2", fit.variance[3] / (constants::two_pi * constants::two_pi)}}},
              {"iterations", fit.iterations}};
}

Json dip_json(const DipMeasure& dip) {
  return Json{{"fwhm_hz", hertz(dip.fwhm)},
              {"depth", dip.depth},
              {"baseline", dip.baseline},
              {"minimum_at_hz", hertz(dip.center)}};
}

template <typename F>
Json attempt(F&& f) {
  try {
    return f();
  } catch (const NumericError& e) {
    return Json{{"error", e.what()}};
  }
}

void spectrum_plot(const Outputs& outputs, const std::string& csv, const std::string& title) {
  auto gp = outputs.open(".gp");
  gp << "set datafile separator ','\n"
     << "set title '" << title << "'\n"
     << "set xlabel 'detuning (MHz)'\n"
     << "set ylabel 'probability'\n"
     << "set key bottom right\n"
     << "plot '" << csv << "' using ($1/1e6):2 with linespoints title 'P_gr', \\\n"
     << "     '' using ($1/1e6):(column('P_0_0[1]')) with lines title 'P(0,0)', \\\n"
     << "     '' using ($1/1e6):(column('P_0_1[1]')) with lines title 'P(0,1)'\n";
}

ScanOptions scan_options(const ScenarioConfig& config, unsigned threads) {
  ScanOptions options;
  options.threads = threads;
  options.evolution.method = config.method;
  return options;
}

int leak_status(bool warned, double max_leak, const ScenarioConfig& config, std::ostream& err) {
  if (!warned) return exit_ok;
  err << "warning: population outside the motional grid reached " << max_leak << " (threshold "
      << config.scenario.leak_warning_threshold << "); results written anyway\n";
  return exit_leak;
}

int cmd_modes(const ScenarioConfig& config, const Outputs& outputs, std::ostream& out) {
  const SpectroscopyScenario& sc = config.scenario;
  const TwoIonSystem& system = sc.system;
  const ModeFrequencies modes = system.modes();
  const ModeVectors vec = system.vectors();
  const LambDicke eta_laser = sc.laser_lamb_dicke();
  const LambDicke eta_axial = lamb_dicke(system, {sc.line.wavelength(), 1.0}, IonRole::target);
  const LambDicke eta_readout = lamb_dicke(system, config.readout.beam, IonRole::readout);
  const SpectralRegime regime = resolve_regime(sc.laser, sc.line, sc.regime);
  const SpectralRegime sat_regime =
      regime == SpectralRegime::laser_limited ? SpectralRegime::laser_limited : SpectralRegime::transition_limited;
  const double i_sat = saturation_intensity(sc.line, sc.laser, sat_regime);
  const double i_sat_eff = effective_saturation_intensity(sc.line, sc.laser, sat_regime);
  const double rate = base_rate(sc.laser, sc.line, 0.0, Channel::absorption, sc.regime);

  out << std::setprecision(6);
  out << "target " << system.target().label << ", readout " << system.readout().label
      << ", mass ratio " << system.mass_ratio() << "\n";
  out << "in-phase mode      " << hertz(modes.in_phase) / 1e3 << " kHz  (b_r " << vec.ip_readout << ", b_t "
      << vec.ip_target << ")\n";
  out << "out-of-phase mode  " << hertz(modes.out_of_phase) / 1e3 << " kHz  (b_r " << vec.op_readout << ", b_t "
      << vec.op_target << ")\n";
  out << "Lamb-Dicke, spectroscopy beam on target   ip " << eta_laser.ip << "  op " << eta_laser.op << "\n";
  out << "Lamb-Dicke, axial photon on target        ip " << eta_axial.ip << "  op " << eta_axial.op << "\n";
  out << "Lamb-Dicke, readout beam on readout ion   ip " << eta_readout.ip << "  op " << eta_readout.op << "\n";
  out << "saturation intensity " << i_sat << " W/m^2 two-level, " << i_sat_eff << " W/m^2 with level scaling\n";
  out << "laser intensity " << sc.laser.intensity << " W/m^2, resonant absorption rate " << rate << " 1/s\n";
  out << "spectrum pulse " << config.scan.tau_spec * 1e3 << " ms, scaled time "
      << scaled_time(config.scan.tau_spec, sc) << "\n";

  auto file = outputs.open("_modes.json");
  const Json report{
      {"in_phase_hz", hertz(modes.in_phase)},
      {"out_of_phase_hz", hertz(modes.out_of_phase)},
      {"mass_ratio", system.mass_ratio()},
      {"eigenvectors", {{"ip_readout", vec.ip_readout}, {"ip_target", vec.ip_target},
                        {"op_readout", vec.op_readout}, {"op_target", vec.op_target}}},
      {"lamb_dicke",
       {{"spectroscopy", {{"ip", eta_laser.ip}, {"op", eta_laser.op}}},
        {"axial_photon", {{"ip", eta_axial.ip}, {"op", eta_axial.op}}},
        {"readout", {{"ip", eta_readout.ip}, {"op", eta_readout.op}}}}},
      {"saturation_intensity_w_m2", i_sat},
      {"effective_saturation_intensity_w_m2", i_sat_eff},
      {"laser_intensity_w_m2", sc.laser.intensity},
      {"resonant_absorption_rate_per_s", rate},
      {"config", config.document}};
  file << report.dump(2) << '\n';
  return exit_ok;
}

int cmd_dynamics(const ScenarioConfig& config, const Outputs& outputs, std::ostream& err) {
  const SpectroscopyScenario& sc = config.scenario;
  const RateModel model(sc);
  const ReadoutModel reader(sc.system, config.readout);
  std::vector<double> times(static_cast<std::size_t>(config.scan.time_points));
  for (std::size_t i = 0; i < times.size(); ++i) {
    times[i] = config.scan.duration * static_cast<double>(i) / static_cast<double>(times.size() - 1);
  }
  EvolutionOptions options;
  options.method = config.method;
  options.leak_warning_threshold = sc.leak_warning_threshold;
  const auto series = evolve_series(model.build(config.scan.dynamics_detuning),
                                    PopulationState::motional_ground(sc.grid), times, options);
  const double rate = base_rate(sc.laser, sc.line, 0.0, Channel::absorption, sc.regime);

  const std::string csv = outputs.prefix + "_dynamics.csv";
  auto file = outputs.open("_dynamics.csv");
  file << "t[s],tau_scaled[1],leaked[1],P_gr[1],p_g_0_0[1],p_e_0_0[1]";
  marginal_header(file, sc.grid);
  file << '\n';
  bool warned = false;
  double max_leak = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const PopulationState& s = series[i].state;
    warned = warned || series[i].leak_warning;
    max_leak = std::max(max_leak, s.leaked());
    file << times[i] << ',' << times[i] * rate << ',' << s.leaked() << ',' << reader.signal(s) << ','
         << s.at(InternalState::ground, 0, 0) << ',' << s.at(InternalState::excited, 0, 0);
    marginal_row(file, s);
    file << '\n';
  }
  if (config.output.gnuplot) {
    auto gp = outputs.open("_dynamics.gp");
    gp << "set datafile separator ','\n"
       << "set xlabel 'scaled time'\n"
       << "set ylabel 'population'\n"
       << "plot for [c in 'P_0_0[1] P_0_1[1] P_1_0[1] P_1_1[1] P_0_2[1]'] '" << csv
       << "' using 2:(column(c)) with lines title c\n";
  }
  return leak_status(warned, max_leak, config, err);
}

int cmd_spectrum(const ScenarioConfig& config, const Outputs& outputs, unsigned threads, std::ostream& out,
                 std::ostream& err) {
  const SpectroscopyScenario& sc = config.scenario;
  const auto detunings = detuning_grid(config.scan.half_span, config.scan.points);
  const auto records =
      readout_spectrum(RateModel(sc), detunings, config.scan.tau_spec, config.readout, scan_options(config, threads));

  const std::string csv = outputs.prefix + "_spectrum.csv";
  auto file = outputs.open("_spectrum.csv");
  file << "detuning[Hz],P_gr[1],leaked[1],leak_warning[bool]";
  marginal_header(file, sc.grid);
  file << '\n';
  bool warned = false;
  double max_leak = 0.0;
  for (const auto& r : records) {
    warned = warned || r.leak_warning;
    max_leak = std::max(max_leak, r.leaked());
    file << hertz(r.detuning) << ',' << r.p_gr << ',' << r.leaked() << ',' << (r.leak_warning ? 1 : 0);
    marginal_row(file, r.state);
    file << '\n';
  }

  const Json lorentzian = attempt([&] { return fit_json(fit_lorentzian(records)); });
  const Json numeric = attempt([&] { return dip_json(numeric_fwhm_depth(records)); });
  const Json result{{"command", "spectrum"},
                    {"tau_spec_s", config.scan.tau_spec},
                    {"tau_scaled", scaled_time(config.scan.tau_spec, sc)},
                    {"lorentzian_fit", lorentzian},
                    {"numeric", numeric},
                    {"max_leaked", max_leak},
                    {"leak_warning", warned},
                    {"config", config.document}};
  auto json = outputs.open("_fit.json");
  json << result.dump(2) << '\n';
  if (lorentzian.contains("fwhm_hz")) {
    out << "Lorentzian fit: FWHM " << lorentzian["fwhm_hz"].get<double>() / 1e6 << " MHz, depth "
        << lorentzian["depth"].get<double>() << "\n";
  } else {
    out << "Lorentzian fit failed: " << lorentzian["error"].get<std::string>() << "\n";
  }
  if (config.output.gnuplot) spectrum_plot(Outputs{outputs.directory, outputs.prefix + "_spectrum"}, csv, "readout spectrum");
  return leak_status(warned, max_leak, config, err);
}

int cmd_widthcurve(const ScenarioConfig& config, const Outputs& outputs, unsigned threads, std::ostream& err) {
  const SpectroscopyScenario& sc = config.scenario;
  if (config.scan.taus_scaled.empty()) throw ConfigError("scan.taus_scaled: must not be empty");
  const auto detunings = detuning_grid(config.scan.half_span, config.scan.points);
  const auto curve =
      width_depth_curve(RateModel(sc), detunings, config.scan.taus_scaled, config.readout, scan_options(config, threads));

  const std::string csv = outputs.prefix + "_widthcurve.csv";
  auto file = outputs.open("_widthcurve.csv");
  file << "tau_scaled[1],tau_spec[s],fit_fwhm[Hz],fit_depth[1],numeric_fwhm[Hz],numeric_depth[1],max_leaked[1],"
          "leak_warning[bool]\n";
  bool warned = false;
  double max_leak = 0.0;
  auto field = [](const auto& opt, auto get) -> std::string {
    if (!opt) return "nan";
    std::ostringstream s;
    s << std::setprecision(12) << get(*opt);
    return s.str();
  };
  for (const auto& p : curve) {
    warned = warned || p.leak_warning;
    max_leak = std::max(max_leak, p.max_leak);
    file << p.tau_scaled << ',' << p.tau_spec << ','
         << field(p.fit, [](const FitResult& f) { return hertz(f.fwhm); }) << ','
         << field(p.fit, [](const FitResult& f) { return f.depth; }) << ','
         << field(p.numeric, [](const DipMeasure& d) { return hertz(d.fwhm); }) << ','
         << field(p.numeric, [](const DipMeasure& d) { return d.depth; }) << ',' << p.max_leak << ','
         << (p.leak_warning ? 1 : 0) << '\n';
  }
  if (config.output.gnuplot) {
    auto gp = outputs.open("_widthcurve.gp");
    gp << "set datafile separator ','\n"
       << "set xlabel 'scaled time'\n"
       << "set ylabel 'FWHM (MHz)'\n"
       << "set y2label 'depth'\n"
       << "set y2tics\n"
       << "plot '" << csv << "' using 1:($3/1e6) with linespoints title 'fit FWHM', \\\n"
       << "     '' using 1:($5/1e6) with linespoints title 'numeric FWHM', \\\n"
       << "     '' using 1:4 axes x1y2 with linespoints title 'fit depth'\n";
  }
  return leak_status(warned, max_leak, config, err);
}

int cmd_reduced(const ScenarioConfig& config, const Outputs& outputs, std::ostream& out) {
  const ReducedModel model(config.scenario);
  const auto detunings = detuning_grid(config.scan.half_span, config.scan.points);
  const auto records = reduced_spectrum(model, detunings, config.scan.tau_spec, config.kappa);

  const std::string csv = outputs.prefix + "_reduced.csv";
  auto file = outputs.open("_reduced.csv");
  file << "detuning[Hz],P_gr[1],p_g0[1],p_e0[1],p_aux[1],model\n";
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& r : records) {
    file << hertz(r.detuning) << ',' << r.p_gr << ',' << r.state.p_g0 << ',' << r.state.p_e0 << ','
         << r.state.p_aux << ",reduced\n";
    x.push_back(r.detuning);
    y.push_back(r.p_gr);
  }
  const Json lorentzian = attempt([&] { return fit_json(fit_lorentzian(x, y)); });
  const Json result{{"command", "reduced"},
                    {"model", "reduced"},
                    {"kappa", config.kappa},
                    {"tau_spec_s", config.scan.tau_spec},
                    {"tau_scaled", scaled_time(config.scan.tau_spec, config.scenario)},
                    {"lorentzian_fit", lorentzian},
                    {"numeric", attempt([&] { return dip_json(numeric_fwhm_depth(x, y)); })},
                    {"config", config.document}};
  auto json = outputs.open("_reduced_fit.json");
  json << result.dump(2) << '\n';
  if (lorentzian.contains("fwhm_hz")) {
    out << "reduced model fit: FWHM " << lorentzian["fwhm_hz"].get<double>() / 1e6 << " MHz, depth "
        << lorentzian["depth"].get<double>() << "\n";
  }
  if (config.output.gnuplot) {
    auto gp = outputs.open("_reduced.gp");
    gp << "set datafile separator ','\n"
       << "set xlabel 'detuning (MHz)'\n"
       << "set ylabel 'P_gr'\n"
       << "plot '" << csv << "' using ($1/1e6):2 with linespoints title 'reduced model'\n";
  }
  return exit_ok;
}

int cmd_dtable(const ScenarioConfig& config, const Outputs& outputs, std::ostream& out) {
  const SpectroscopyScenario& sc = config.scenario;
  const EmissionTable table = emission_coefficients(sc.pattern, sc.line, sc.system, sc.grid.n_ip_max,
                                                    sc.grid.n_op_max, sc.sidebands.ip, sc.sidebands.op);
  auto file = outputs.open("_dtable.csv");
  table.write_csv(file);
  out << "emission coefficients for pattern " << sc.pattern.name() << ", quadrature order "
      << table.polar_order_used() << "\n";
  return exit_ok;
}

}  // namespace

std::vector<std::string> command_names() { return {"modes", "dynamics", "spectrum", "widthcurve", "reduced", "dtable"}; }

int run(const RunRequest& request, std::ostream& out, std::ostream& err) {
  try {
    const ScenarioConfig config = load_config(request.config_path, request.overrides, request.preset);
    if (request.print_config) {
      out << config.document.dump(2) << '\n';
      return exit_ok;
    }
    const auto names = command_names();
    if (std::find(names.begin(), names.end(), request.command) == names.end()) {
      err << "error: unknown command '" << request.command << "'\n";
      return exit_config;
    }
    const Outputs outputs = prepare_outputs(config);
    write_effective_config(config, outputs);
    if (request.command == "modes") return cmd_modes(config, outputs, out);
    if (request.command == "dynamics") return cmd_dynamics(config, outputs, err);
    if (request.command == "spectrum") return cmd_spectrum(config, outputs, request.threads, out, err);
    if (request.command == "widthcurve") return cmd_widthcurve(config, outputs, request.threads, err);
    if (request.command == "reduced") return cmd_reduced(config, outputs, out);
    return cmd_dtable(config, outputs, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return exit_numeric;
  }
}

}  // namespace prs
