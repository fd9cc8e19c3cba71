#include "prs/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "prs/constants.hpp"
#include "prs/errors.hpp"

namespace prs {

namespace {

using constants::angular;

// Keys that describe the same quantity two ways; setting one clears the other.
const std::pair<const char*, const char*> kAlternatives[] = {
    {"/laser/intensity_w_m2", "/laser/intensity_saturation_fraction"},
    {"/scan/tau_spec_s", "/scan/tau_scaled"},
};

Json evenly_spaced(double first, double step, int count) {
  Json list = Json::array();
  for (int i = 0; i < count; ++i) list.push_back(first + step * i);
  return list;
}

Json mg24_ca40() {
  return Json{
      {"preset", "mg24_ca40"},
      {"system",
       {{"target", {{"label", "24Mg+"}, {"atomic_mass_u", constants::mass_mg24_atom}}},
        {"readout", {{"label", "40Ca+"}, {"atomic_mass_u", constants::mass_ca40_atom}}},
        {"axial_frequency_hz", 147.9e3}}},
      {"transition",
       {{"wavelength_m", 279.6e-9},
        {"linewidth_hz", 41.8e6},
        {"absorption_scale", 2.0 / 3.0},
        {"stimulated_scale", 2.0 / 3.0}}},
      {"laser",
       {{"shape", "delta"},
        {"fwhm_hz", 0.0},
        {"intensity_w_m2", nullptr},
        {"intensity_saturation_fraction", 6.54e-6},
        {"saturation_reference", "transition"},
        {"axial_projection", std::sqrt(0.5)}}},
      {"emission", {{"enabled", true}, {"pattern", "mg_mixed"}}},
      {"grid", {{"n_ip_max", 19}, {"n_op_max", 19}}},
      {"sidebands", {{"ip", 5}, {"op", 6}}},
      {"heating", {{"ip_per_s", 14.0}, {"op_per_s", 1.7}}},
      {"regime", "automatic"},
      {"leak_warning", 0.01},
      {"evolution", {{"method", "matrix_exponential"}}},
      {"readout",
       {{"wavelength_m", 729e-9},
        {"axial_projection", 1.0},
        {"rabi_frequency_hz", 10e3},
        {"two_pulse", false},
        {"leak_survival", 0.5}}},
      {"scan",
       {{"half_span_hz", 150e6},
        {"points", 101},
        {"tau_spec_s", 1.3e-3},
        {"tau_scaled", nullptr},
        {"taus_scaled", evenly_spaced(0.5, 0.5, 20)},
        {"duration_s", 5.3e-3},
        {"dynamics_detuning_hz", 0.0},
        {"time_points", 54}}},
      {"reduced", {{"kappa", 0.5}}},
      {"output", {{"directory", "."}, {"prefix", "mg24_ca40"}, {"gnuplot", true}}},
  };
}

Json mgh24_ca40() {
  Json doc = mg24_ca40();
  doc["preset"] = "mgh24_ca40";
  doc["system"]["target"] = {{"label", "24MgH+"}, {"atomic_mass_u", constants::mass_mg24_atom + constants::mass_h1_atom}};
  doc["transition"] = {{"wavelength_m", 6.17e-6},
                       {"linewidth_hz", 2.50},
                       {"absorption_scale", 1.0 / 9.0},
                       {"stimulated_scale", 1.0 / 3.0}};
  doc["laser"]["shape"] = "gaussian";
  doc["laser"]["fwhm_hz"] = 50e6;
  doc["laser"]["intensity_saturation_fraction"] = 2.08e4;
  doc["laser"]["saturation_reference"] = "laser";
  doc["emission"]["pattern"] = "isotropic";
  doc["sidebands"] = {{"ip", 3}, {"op", 3}};
  doc["scan"]["half_span_hz"] = 300e6;
  doc["scan"]["tau_spec_s"] = 10e-3;
  doc["scan"]["taus_scaled"] = evenly_spaced(820.0, 820.0, 20);
  doc["scan"]["duration_s"] = 50e-3;
  doc["scan"]["time_points"] = 51;
  doc["output"]["prefix"] = "mgh24_ca40";
  return doc;
}

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field + ": " + message);
}

std::string dotted(const Json::json_pointer& pointer) {
  std::string s = pointer.to_string();
  if (!s.empty() && s.front() == '/') s.erase(0, 1);
  for (char& c : s)
    if (c == '/') c = '.';
  return s;
}

// Every key in `user` must exist in `schema`, with objects where objects are expected.
void check_keys(const Json& user, const Json& schema, const Json::json_pointer& at) {
  for (const auto& [key, value] : user.items()) {
    const auto here = at / key;
    if (!schema.contains(key)) fail(dotted(here), "unknown key");
    if (schema[key].is_object() != value.is_object()) {
      fail(dotted(here), schema[key].is_object() ? "expected an object" : "did not expect an object");
    }
    if (value.is_object()) check_keys(value, schema[key], here);
  }
}

void clear_alternative(Json& document, const Json::json_pointer& set) {
  for (const auto& [a, b] : kAlternatives) {
    const Json::json_pointer pa(a);
    const Json::json_pointer pb(b);
    if (set == pa && !document.at(pa).is_null()) document[pb] = nullptr;
    if (set == pb && !document.at(pb).is_null()) document[pa] = nullptr;
  }
}

class Reader {
 public:
  explicit Reader(const Json& document) : document_(document) {}

  const Json& raw(const std::string& path) const {
    const Json::json_pointer pointer(pointer_of(path));
    if (!document_.contains(pointer)) fail(path, "missing");
    return document_.at(pointer);
  }
  double number(const std::string& path) const {
    const Json& v = raw(path);
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }
  double positive(const std::string& path) const {
    const double x = number(path);
    if (!(x > 0.0)) fail(path, "must be positive");
    return x;
  }
  double non_negative(const std::string& path) const {
    const double x = number(path);
    if (x < 0.0) fail(path, "must be non-negative");
    return x;
  }
  std::optional<double> optional_number(const std::string& path) const {
    if (raw(path).is_null()) return std::nullopt;
    return number(path);
  }
  int integer(const std::string& path) const {
    const Json& v = raw(path);
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
  }
  bool boolean(const std::string& path) const {
    const Json& v = raw(path);
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& path) const {
    const Json& v = raw(path);
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const std::string& path) const {
    const Json& v = raw(path);
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) fail(path, "expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  static std::string pointer_of(const std::string& path) {
    std::string p = "/" + path;
    for (char& c : p)
      if (c == '.') c = '/';
    return p;
  }

 private:
  const Json& document_;
};

template <typename F>
auto guarded(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  } catch (const std::domain_error& e) {
    fail(field, e.what());
  }
}

}  // namespace

std::vector<std::string> preset_names() { return {"mg24_ca40", "mgh24_ca40"}; }

Json preset_document(const std::string& name) {
  if (name == "mg24_ca40") return mg24_ca40();
  if (name == "mgh24_ca40") return mgh24_ca40();
  fail("preset", "unknown preset '" + name + "'");
}

Json resolve_document(const Json& user) {
  if (!user.is_object()) fail("(root)", "configuration must be a JSON object");
  std::string name = "mg24_ca40";
  if (user.contains("preset")) {
    if (!user["preset"].is_string()) fail("preset", "expected a string");
    name = user["preset"].get<std::string>();
  }
  Json document = preset_document(name);
  check_keys(user, document, Json::json_pointer());
  for (const auto& [a, b] : kAlternatives) {
    const Json::json_pointer pa(a);
    const Json::json_pointer pb(b);
    const bool has_a = user.contains(pa) && !user.at(pa).is_null();
    const bool has_b = user.contains(pb) && !user.at(pb).is_null();
    if (has_a && has_b) fail(dotted(pa), "conflicts with " + dotted(pb) + "; give only one");
  }
  document.merge_patch(user);
  // merge_patch drops keys set to null; put them back.
  const Json flat_schema = preset_document(name).flatten();
  for (const auto& entry : flat_schema.items()) {
    const Json::json_pointer p(entry.key());
    if (!document.contains(p)) document[p] = nullptr;
  }
  for (const auto& [a, b] : kAlternatives) {
    const Json::json_pointer pa(a);
    const Json::json_pointer pb(b);
    if (user.contains(pa) && !user.at(pa).is_null()) document[pb] = nullptr;
    if (user.contains(pb) && !user.at(pb).is_null()) document[pa] = nullptr;
  }
  return document;
}

void apply_override(Json& document, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) fail(assignment, "override must look like key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  const Json::json_pointer pointer(Reader::pointer_of(path));
  if (!document.contains(pointer)) fail(path, "unknown key");
  if (document.at(pointer).is_object()) fail(path, "cannot replace a whole section");
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  document[pointer] = value;
  clear_alternative(document, pointer);
}

ScenarioConfig build_config(const Json& document) {
  const Reader in(document);
  const IonSpecies target = guarded("system.target", [&] {
    return singly_charged(in.string("system.target.label"), in.positive("system.target.atomic_mass_u"));
  });
  const IonSpecies readout_ion = guarded("system.readout", [&] {
    return singly_charged(in.string("system.readout.label"), in.positive("system.readout.atomic_mass_u"));
  });
  const double omega_z = angular(in.positive("system.axial_frequency_hz"));
  SpectroscopyScenario sc{TwoIonSystem(target, readout_ion, omega_z), {}, {}, {}};

  const double abs_scale = in.positive("transition.absorption_scale");
  const double stim_scale = in.positive("transition.stimulated_scale");
  if (abs_scale > 1.0) fail("transition.absorption_scale", "must not exceed 1");
  if (stim_scale > 1.0) fail("transition.stimulated_scale", "must not exceed 1");
  sc.line = TransitionLine::from_wavelength(in.positive("transition.wavelength_m"),
                                            angular(in.non_negative("transition.linewidth_hz")), abs_scale, stim_scale);

  const std::string shape = in.string("laser.shape");
  if (shape == "delta") {
    sc.laser.shape = LaserShape::delta;
  } else if (shape == "gaussian") {
    sc.laser.shape = LaserShape::gaussian;
  } else {
    fail("laser.shape", "expected 'delta' or 'gaussian'");
  }
  sc.laser.fwhm = angular(in.non_negative("laser.fwhm_hz"));
  if (sc.laser.shape == LaserShape::gaussian && !(sc.laser.fwhm > 0.0)) {
    fail("laser.fwhm_hz", "a gaussian laser needs a positive width");
  }

  const std::string regime = in.string("regime");
  if (regime == "automatic") {
    sc.regime = SpectralRegime::automatic;
  } else if (regime == "transition_limited") {
    sc.regime = SpectralRegime::transition_limited;
  } else if (regime == "laser_limited") {
    sc.regime = SpectralRegime::laser_limited;
  } else if (regime == "general") {
    sc.regime = SpectralRegime::general;
  } else {
    fail("regime", "expected automatic, transition_limited, laser_limited or general");
  }
  guarded("regime", [&] { return resolve_regime(sc.laser, sc.line, sc.regime); });

  const auto absolute = in.optional_number("laser.intensity_w_m2");
  const auto fraction = in.optional_number("laser.intensity_saturation_fraction");
  if (absolute && fraction) fail("laser.intensity_w_m2", "conflicts with laser.intensity_saturation_fraction");
  if (!absolute && !fraction) fail("laser.intensity_w_m2", "give an intensity or a saturation fraction");
  if (absolute) {
    sc.laser.intensity = in.non_negative("laser.intensity_w_m2");
  } else {
    const double f = in.non_negative("laser.intensity_saturation_fraction");
    const std::string reference = in.string("laser.saturation_reference");
    SpectralRegime ref;
    if (reference == "transition") {
      ref = SpectralRegime::transition_limited;
    } else if (reference == "laser") {
      ref = SpectralRegime::laser_limited;
    } else {
      fail("laser.saturation_reference", "expected 'transition' or 'laser'");
    }
    sc.laser.intensity =
        f * guarded("laser.saturation_reference", [&] { return effective_saturation_intensity(sc.line, sc.laser, ref); });
  }
  const double projection = in.non_negative("laser.axial_projection");
  if (projection > 1.0) fail("laser.axial_projection", "must not exceed 1");
  sc.beam = BeamGeometry{sc.line.wavelength(), projection};

  sc.spontaneous_emission = in.boolean("emission.enabled");
  sc.pattern = guarded("emission.pattern", [&] { return EmissionPattern::from_name(in.string("emission.pattern")); });
  sc.grid = {in.integer("grid.n_ip_max"), in.integer("grid.n_op_max")};
  if (sc.grid.n_ip_max < 1) fail("grid.n_ip_max", "must be at least 1");
  if (sc.grid.n_op_max < 1) fail("grid.n_op_max", "must be at least 1");
  sc.sidebands = {in.integer("sidebands.ip"), in.integer("sidebands.op")};
  if (sc.sidebands.ip < 1) fail("sidebands.ip", "must be at least 1");
  if (sc.sidebands.op < 1) fail("sidebands.op", "must be at least 1");
  sc.heating = {in.non_negative("heating.ip_per_s"), in.non_negative("heating.op_per_s")};
  sc.leak_warning_threshold = in.positive("leak_warning");
  if (sc.leak_warning_threshold > 1.0) fail("leak_warning", "must not exceed 1");
  guarded("(scenario)", [&] {
    sc.validate();
    return 0;
  });
  ScenarioConfig config{document, sc, {}, {}, EvolutionMethod::matrix_exponential, 0.5, {}};

  const std::string method = in.string("evolution.method");
  if (method == "matrix_exponential") {
    config.method = EvolutionMethod::matrix_exponential;
  } else if (method == "adaptive") {
    config.method = EvolutionMethod::adaptive;
  } else {
    fail("evolution.method", "expected 'matrix_exponential' or 'adaptive'");
  }

  config.readout.omega_0_r = angular(in.positive("readout.rabi_frequency_hz"));
  const double readout_projection = in.non_negative("readout.axial_projection");
  if (readout_projection > 1.0) fail("readout.axial_projection", "must not exceed 1");
  config.readout.beam = BeamGeometry{in.positive("readout.wavelength_m"), readout_projection};
  config.readout.two_pulse = in.boolean("readout.two_pulse");
  config.readout.options.leak_survival = in.non_negative("readout.leak_survival");
  if (config.readout.options.leak_survival > 1.0) fail("readout.leak_survival", "must not exceed 1");
  guarded("readout", [&] { return ReadoutModel(sc.system, config.readout).pulse_op().duration; });

  ScanSettings& scan = config.scan;
  scan.half_span = angular(in.positive("scan.half_span_hz"));
  scan.points = in.integer("scan.points");
  if (scan.points < 8) fail("scan.points", "need at least 8 points");
  const auto tau_spec = in.optional_number("scan.tau_spec_s");
  const auto tau_scaled = in.optional_number("scan.tau_scaled");
  if (tau_spec && tau_scaled) fail("scan.tau_spec_s", "conflicts with scan.tau_scaled");
  if (!tau_spec && !tau_scaled) fail("scan.tau_spec_s", "give a pulse length or a scaled time");
  if (tau_spec) {
    scan.tau_spec = in.non_negative("scan.tau_spec_s");
  } else {
    scan.tau_spec = guarded("scan.tau_scaled", [&] { return spectroscopy_time(in.non_negative("scan.tau_scaled"), sc); });
  }
  scan.taus_scaled = in.numbers("scan.taus_scaled");
  for (std::size_t i = 0; i < scan.taus_scaled.size(); ++i) {
    if (scan.taus_scaled[i] < 0.0 || (i > 0 && scan.taus_scaled[i] <= scan.taus_scaled[i - 1])) {
      fail("scan.taus_scaled", "must be non-negative and strictly ascending");
    }
  }
  scan.duration = in.non_negative("scan.duration_s");
  scan.time_points = in.integer("scan.time_points");
  scan.dynamics_detuning = angular(in.number("scan.dynamics_detuning_hz"));
  if (scan.time_points < 2) fail("scan.time_points", "need at least 2 samples");

  config.kappa = in.number("reduced.kappa");
  if (config.kappa < 0.0 || config.kappa > 1.0) fail("reduced.kappa", "must lie in [0, 1]");

  config.output.directory = in.string("output.directory");
  config.output.prefix = in.string("output.prefix");
  if (config.output.prefix.empty()) fail("output.prefix", "must not be empty");
  config.output.gnuplot = in.boolean("output.gnuplot");
  return config;
}

ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides,
                           const std::string& preset) {
  Json user = Json::object();
  if (!path.empty()) {
    std::ifstream file(path);
    if (!file) fail(path, "cannot open configuration file");
    user = Json::parse(file, nullptr, false, true);
    if (user.is_discarded()) fail(path, "not valid JSON");
  }
  if (!preset.empty()) {
    if (user.contains("preset") && user["preset"] != preset) fail("preset", "file and command line disagree");
    user["preset"] = preset;
  }
  Json document = resolve_document(user);
  for (const auto& assignment : overrides) apply_override(document, assignment);
  return build_config(document);
}

}  // namespace prs
