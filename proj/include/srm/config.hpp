#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>

#include "srm/coil.hpp"
#include "srm/dynamics.hpp"
#include "srm/spectrum.hpp"
#include "srm/units.hpp"

namespace srm {

// Flat `section.key = value` text format, one pair per line, `#` comments.
struct KeyValueConfig {
  std::map<std::string, std::string> values;

  static KeyValueConfig parse(const std::string& text, const std::string& origin = "");
  static KeyValueConfig load(const std::string& path);
  std::string serialize() const;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values[key] = value; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
};

// Every run resolves to this struct; commands echo it back out so a run can
// be reproduced from its own output directory.
struct RunConfig {
  // constants
  double gamma_ghz = -0.2526;
  double lambda_ghz = 59.501;
  double g_factor = -2.0023;
  // gas
  double pressure_bar = 0.5;
  double temperature_k = 295.0;
  double eta = 0.04;
  // rotor / field
  int n = 71;
  double b_tesla = 1.0;
  bool inverted = false;
  // coil + sample
  std::string coil_shape = "elliptical";
  double coil_a_mm = 0.93;  // full axis lengths, as quoted for the cross-section
  double coil_b_mm = 3.8;
  double coil_alpha_deg = 59.0;
  int coil_turns = 1;
  std::string coil_alignment = "transverse";
  double sample_extent_mm = 4.0;
  int sample_dipoles = 11;
  double sample_beam_radius_mm = 0.1;
  // time grid
  double grid_t_start_ns = 0.0;
  double grid_t_end_ns = 10.0;
  double grid_dt_ps = 1.0;
  // trace synthesis
  std::string channel = "transverse";  // transverse | longitudinal-infield | longitudinal-fieldfree
  std::string freq_method = "exact";   // exact | approximate
  double amplitude_bohr = 2.0023 / 3.0;
  double tau_ns = 3.1;
  double tau_plus_ns = 3.0;
  double tau_minus_ns = 2.0;
  double rise_ns = 2.0;        // field-free rise at rise_ref_bar, scales as 1/P
  double rise_ref_bar = 0.9;
  double infield_rise_ns = 0.25;  // pressure-independent
  bool bias_term = true;
  std::string emf_route = "analytic";  // analytic | numeric (transverse only)
  double pretrigger_ns = 2.0;
  // noise / fit
  double snr_db = std::numeric_limits<double>::infinity();
  std::string fit_mode = "fixed";  // fixed | free
  int fit_max_iter = 200;
  double baseline_ns = -1.0;  // baseline window: samples with t < this
  // run
  std::uint64_t seed = 12345;
  std::string out_dir = "out";

  static RunConfig from_kv(const KeyValueConfig& kv);
  KeyValueConfig to_kv() const;

  MolecularConstants constants() const;
  GasConditions gas() const;
  RotorFieldConfig rotor() const;
  CoilGeometry coil() const;
  SampleModel sample_model() const;
  TimeGrid grid() const;
  FreqMethod frequency_method() const;
};

}  // namespace srm
