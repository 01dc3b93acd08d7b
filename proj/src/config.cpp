#include "srm/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "srm/errors.hpp"

namespace srm {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
  char buf[48];
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& key) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: cannot parse '" + s + "' as number for " + key);
  }
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config " + origin + ": line " + std::to_string(lineno) +
                            " has no '='");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ValidationError("config " + origin + ": empty key on line " +
                            std::to_string(lineno));
    kv.values[key] = value;
  }
  return kv;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string KeyValueConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : values) out << k << " = " << v << "\n";
  return out.str();
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : parse_double(it->second, key);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("config: cannot parse '" + it->second + "' as integer for " + key);
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw ValidationError("config: cannot parse '" + it->second + "' as bool for " + key);
}

RunConfig RunConfig::from_kv(const KeyValueConfig& kv) {
  RunConfig c;
  c.gamma_ghz = kv.get_double("constants.gamma_ghz", c.gamma_ghz);
  c.lambda_ghz = kv.get_double("constants.lambda_ghz", c.lambda_ghz);
  c.g_factor = kv.get_double("constants.g_factor", c.g_factor);
  c.pressure_bar = kv.get_double("gas.pressure_bar", c.pressure_bar);
  c.temperature_k = kv.get_double("gas.temperature_k", c.temperature_k);
  c.eta = kv.get_double("gas.eta", c.eta);
  c.n = kv.get_int("rotor.n", c.n);
  c.b_tesla = kv.get_double("field.b_tesla", c.b_tesla);
  c.inverted = kv.get_bool("field.inverted", c.inverted);
  c.coil_shape = kv.get("coil.shape", c.coil_shape);
  c.coil_a_mm = kv.get_double("coil.a_mm", c.coil_a_mm);
  c.coil_b_mm = kv.get_double("coil.b_mm", c.coil_b_mm);
  c.coil_alpha_deg = kv.get_double("coil.alpha_deg", c.coil_alpha_deg);
  c.coil_turns = kv.get_int("coil.turns", c.coil_turns);
  c.coil_alignment = kv.get("coil.alignment", c.coil_alignment);
  c.sample_extent_mm = kv.get_double("sample.extent_mm", c.sample_extent_mm);
  c.sample_dipoles = kv.get_int("sample.dipoles", c.sample_dipoles);
  c.sample_beam_radius_mm = kv.get_double("sample.beam_radius_mm", c.sample_beam_radius_mm);
  c.grid_t_start_ns = kv.get_double("grid.t_start_ns", c.grid_t_start_ns);
  c.grid_t_end_ns = kv.get_double("grid.t_end_ns", c.grid_t_end_ns);
  c.grid_dt_ps = kv.get_double("grid.dt_ps", c.grid_dt_ps);
  c.channel = kv.get("trace.channel", c.channel);
  c.freq_method = kv.get("trace.method", c.freq_method);
  c.amplitude_bohr = kv.get_double("trace.amplitude_bohr", c.amplitude_bohr);
  c.tau_ns = kv.get_double("trace.tau_ns", c.tau_ns);
  c.tau_plus_ns = kv.get_double("trace.tau_plus_ns", c.tau_plus_ns);
  c.tau_minus_ns = kv.get_double("trace.tau_minus_ns", c.tau_minus_ns);
  c.rise_ns = kv.get_double("trace.rise_ns", c.rise_ns);
  c.rise_ref_bar = kv.get_double("trace.rise_ref_bar", c.rise_ref_bar);
  c.infield_rise_ns = kv.get_double("trace.infield_rise_ns", c.infield_rise_ns);
  c.bias_term = kv.get_bool("trace.bias", c.bias_term);
  c.emf_route = kv.get("emf.route", c.emf_route);
  c.pretrigger_ns = kv.get_double("emf.pretrigger_ns", c.pretrigger_ns);
  c.snr_db = kv.get_double("noise.snr_db", c.snr_db);
  c.fit_mode = kv.get("fit.mode", c.fit_mode);
  c.fit_max_iter = kv.get_int("fit.max_iter", c.fit_max_iter);
  c.baseline_ns = kv.get_double("fit.baseline_ns", c.baseline_ns);
  c.seed = static_cast<std::uint64_t>(kv.get_double("seed", static_cast<double>(c.seed)));
  c.out_dir = kv.get("out", c.out_dir);
  return c;
}

KeyValueConfig RunConfig::to_kv() const {
  KeyValueConfig kv;
  kv.set("constants.gamma_ghz", fmt_double(gamma_ghz));
  kv.set("constants.lambda_ghz", fmt_double(lambda_ghz));
  kv.set("constants.g_factor", fmt_double(g_factor));
  kv.set("gas.pressure_bar", fmt_double(pressure_bar));
  kv.set("gas.temperature_k", fmt_double(temperature_k));
  kv.set("gas.eta", fmt_double(eta));
  kv.set("rotor.n", std::to_string(n));
  kv.set("field.b_tesla", fmt_double(b_tesla));
  kv.set("field.inverted", inverted ? "true" : "false");
  kv.set("coil.shape", coil_shape);
  kv.set("coil.a_mm", fmt_double(coil_a_mm));
  kv.set("coil.b_mm", fmt_double(coil_b_mm));
  kv.set("coil.alpha_deg", fmt_double(coil_alpha_deg));
  kv.set("coil.turns", std::to_string(coil_turns));
  kv.set("coil.alignment", coil_alignment);
  kv.set("sample.extent_mm", fmt_double(sample_extent_mm));
  kv.set("sample.dipoles", std::to_string(sample_dipoles));
  kv.set("sample.beam_radius_mm", fmt_double(sample_beam_radius_mm));
  kv.set("grid.t_start_ns", fmt_double(grid_t_start_ns));
  kv.set("grid.t_end_ns", fmt_double(grid_t_end_ns));
  kv.set("grid.dt_ps", fmt_double(grid_dt_ps));
  kv.set("trace.channel", channel);
  kv.set("trace.method", freq_method);
  kv.set("trace.amplitude_bohr", fmt_double(amplitude_bohr));
  kv.set("trace.tau_ns", fmt_double(tau_ns));
  kv.set("trace.tau_plus_ns", fmt_double(tau_plus_ns));
  kv.set("trace.tau_minus_ns", fmt_double(tau_minus_ns));
  kv.set("trace.rise_ns", fmt_double(rise_ns));
  kv.set("trace.rise_ref_bar", fmt_double(rise_ref_bar));
  kv.set("trace.infield_rise_ns", fmt_double(infield_rise_ns));
  kv.set("trace.bias", bias_term ? "true" : "false");
  kv.set("emf.route", emf_route);
  kv.set("emf.pretrigger_ns", fmt_double(pretrigger_ns));
  kv.set("noise.snr_db", fmt_double(snr_db));
  kv.set("fit.mode", fit_mode);
  kv.set("fit.max_iter", std::to_string(fit_max_iter));
  kv.set("fit.baseline_ns", fmt_double(baseline_ns));
  kv.set("seed", std::to_string(seed));
  kv.set("out", out_dir);
  return kv;
}

MolecularConstants RunConfig::constants() const {
  MolecularConstants m;
  m.gamma = ghz_to_joule(gamma_ghz);
  m.lambda = ghz_to_joule(lambda_ghz);
  m.g_factor = g_factor;
  m.validate();
  return m;
}

GasConditions RunConfig::gas() const {
  GasConditions g;
  g.pressure = pressure_bar * 1e5;
  g.temperature = temperature_k;
  g.eta = eta;
  g.validate();
  return g;
}

RotorFieldConfig RunConfig::rotor() const {
  RotorFieldConfig r;
  r.n = n;
  r.b_tesla = b_tesla;
  r.inverted = inverted;
  r.validate();
  return r;
}

CoilGeometry RunConfig::coil() const {
  CoilGeometry c;
  if (coil_shape == "circular")
    c.shape = CoilShape::circular;
  else if (coil_shape == "elliptical")
    c.shape = CoilShape::elliptical;
  else
    throw ValidationError("config: coil.shape must be circular or elliptical");
  c.semi_axis_a = 0.5 * coil_a_mm * 1e-3;
  c.semi_axis_b = 0.5 * coil_b_mm * 1e-3;
  c.tilt_alpha = coil_alpha_deg * M_PI / 180.0;
  c.turns = coil_turns;
  if (coil_alignment == "longitudinal")
    c.alignment = CoilAxis::longitudinal;
  else if (coil_alignment == "transverse")
    c.alignment = CoilAxis::transverse_tilted;
  else
    throw ValidationError("config: coil.alignment must be longitudinal or transverse");
  c.validate();
  return c;
}

SampleModel RunConfig::sample_model() const {
  return SampleModel::beam_line(sample_extent_mm * 1e-3, sample_dipoles,
                                sample_beam_radius_mm * 1e-3);
}

TimeGrid RunConfig::grid() const {
  TimeGrid g;
  g.t0 = grid_t_start_ns * 1e-9;
  g.dt = grid_dt_ps * 1e-12;
  const double span = (grid_t_end_ns - grid_t_start_ns) * 1e-9;
  if (!(span > 0.0)) throw ValidationError("config: grid.t_end_ns must exceed t_start_ns");
  g.n = static_cast<std::size_t>(std::floor(span / g.dt + 0.5)) + 1;
  g.validate();
  return g;
}

FreqMethod RunConfig::frequency_method() const {
  if (freq_method == "exact") return FreqMethod::exact_spectrum;
  if (freq_method == "approximate") return FreqMethod::approximate_eq2;
  throw ValidationError("config: trace.method must be exact or approximate");
}

}  // namespace srm
