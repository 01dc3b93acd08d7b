#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srm/commands.hpp"
#include "srm/errors.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> n;
  std::optional<double> b;
  std::optional<double> pressure_bar;
  std::optional<double> tau_ns;
  std::optional<double> amplitude_bohr;
  std::optional<double> snr_db;
  std::optional<std::string> channel;
  std::optional<std::string> method;
  std::optional<std::string> fit_mode;
  std::optional<std::string> emf_route;
};

srm::RunConfig resolve_config(const Flags& f) {
  srm::KeyValueConfig kv;
  std::string path = f.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("SRM_CONFIG")) path = env;
  }
  if (!path.empty()) kv = srm::KeyValueConfig::load(path);
  srm::RunConfig cfg = srm::RunConfig::from_kv(kv);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  if (f.n) cfg.n = *f.n;
  if (f.b) cfg.b_tesla = *f.b;
  if (f.pressure_bar) cfg.pressure_bar = *f.pressure_bar;
  if (f.tau_ns) cfg.tau_ns = *f.tau_ns;
  if (f.amplitude_bohr) cfg.amplitude_bohr = *f.amplitude_bohr;
  if (f.snr_db) cfg.snr_db = *f.snr_db;
  if (f.channel) cfg.channel = *f.channel;
  if (f.method) cfg.freq_method = *f.method;
  if (f.fit_mode) cfg.fit_mode = *f.fit_mode;
  if (f.emf_route) cfg.emf_route = *f.emf_route;
  return cfg;
}

void add_common_flags(CLI::App* app, Flags* f) {
  app->add_option("--config", f->config_path, "configuration file (flat key = value)");
  app->add_option("--seed", f->seed, "deterministic run seed");
  app->add_option("--out", f->out_dir, "output directory");
  app->add_option("--N", f->n, "rotational quantum number");
  app->add_option("--B", f->b, "magnetic field, tesla");
  app->add_option("--pressure", f->pressure_bar, "gas pressure, bar");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-rotation magnetization toolkit"};
  app.require_subcommand(1);
  Flags f;

  auto* spectrum = app.add_subcommand(
      "spectrum", "diagonalize the spin-rotation Hamiltonian, export CSV/JSON");
  bool oracle = false;
  add_common_flags(spectrum, &f);
  spectrum->add_flag("--oracle", oracle,
                     "cross-check against the uncoupled brute-force spectrum");

  auto* synthesize =
      app.add_subcommand("synthesize", "generate magnetization and EMF records");
  add_common_flags(synthesize, &f);
  synthesize->add_option("--channel", f.channel,
                         "transverse | longitudinal-infield | longitudinal-fieldfree");
  synthesize->add_option("--method", f.method, "exact | approximate frequencies");
  synthesize->add_option("--tau", f.tau_ns, "decay time, ns");
  synthesize->add_option("--amplitude", f.amplitude_bohr,
                         "per-molecule amplitude, Bohr magnetons");
  synthesize->add_option("--snr", f.snr_db, "noise SNR in dB (omit for none)");
  synthesize->add_option("--emf", f.emf_route, "analytic | numeric EMF route");

  auto* fit = app.add_subcommand("fit", "fit the damped two-branch EMF model");
  add_common_flags(fit, &f);
  std::string input, plus_path, minus_path;
  fit->add_option("input", input, "EMF waveform CSV");
  fit->add_option("--plus", plus_path, "positive-sense shot (paired with --minus)");
  fit->add_option("--minus", minus_path, "negative-sense shot");
  fit->add_option("--mode", f.fit_mode, "fixed | free frequencies");
  fit->add_option("--method", f.method, "frequency source for fixed mode");

  auto* coil = app.add_subcommand("coil", "coupling-coefficient report");
  add_common_flags(coil, &f);

  auto* reproduce =
      app.add_subcommand("reproduce", "emit the model dataset for a figure tag");
  std::string tag;
  reproduce->add_option("tag", tag, "fig2 | fig3 | fig4 | fig5")->required();
  add_common_flags(reproduce, &f);

  auto* sweep = app.add_subcommand("sweep", "waveform family over N x B x P grids");
  add_common_flags(sweep, &f);
  std::vector<int> n_list;
  std::vector<double> b_list{1.0};
  std::vector<double> p_list{0.5};
  sweep->add_option("--n-list", n_list, "rotational quantum numbers")
      ->required()
      ->delimiter(',');
  sweep->add_option("--b-list", b_list, "field values, tesla")->delimiter(',');
  sweep->add_option("--p-list", p_list, "pressures, bar")->delimiter(',');
  sweep->add_option("--channel", f.channel, "trace channel for the family");

  CLI11_PARSE(app, argc, argv);

  try {
    const srm::RunConfig cfg = resolve_config(f);
    srm::CommandResult res;
    if (spectrum->parsed())
      res = srm::cmd_spectrum(cfg, oracle);
    else if (synthesize->parsed())
      res = srm::cmd_synthesize(cfg);
    else if (fit->parsed())
      res = srm::cmd_fit(cfg, input, plus_path, minus_path);
    else if (coil->parsed())
      res = srm::cmd_coil(cfg);
    else if (reproduce->parsed())
      res = srm::cmd_reproduce(cfg, tag);
    else if (sweep->parsed())
      res = srm::cmd_sweep(cfg, n_list, b_list, p_list);
    for (const std::string& path : res.outputs) std::cout << path << "\n";
    return res.exit_code;
  } catch (const srm::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const srm::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
