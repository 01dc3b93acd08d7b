#include "srm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "srm/errors.hpp"

namespace srm {

void GasConditions::validate() const {
  if (!(pressure > 0.0) || !std::isfinite(pressure))
    throw ValidationError("GasConditions: pressure must be positive");
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw ValidationError("GasConditions: temperature must be positive");
  if (!(eta > 0.0) || !(eta <= 1.0))
    throw ValidationError("GasConditions: eta must lie in (0, 1]");
}

double number_density(const GasConditions& gas, const UniversalConstants& uni) {
  gas.validate();
  return gas.eta * gas.pressure / (uni.k_B * gas.temperature);
}

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("TimeGrid: dt must be positive");
  if (n == 0) throw ValidationError("TimeGrid: empty grid");
  if (!std::isfinite(t0)) throw ValidationError("TimeGrid: t0 must be finite");
}

void TraceParameters::validate(const UniversalConstants& uni) const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw ValidationError("TraceParameters: amplitude must be >= 0");
  if (amplitude > std::fabs(g_factor) * uni.mu_B)
    throw ValidationError(
        "TraceParameters: amplitude exceeds |g| mu_B; the two-branch kernel would "
        "break the 2|g| mu_B per-molecule bound");
  if (!(tau > 0.0)) throw ValidationError("TraceParameters: tau must be positive");
  if (rise_time < 0.0) throw ValidationError("TraceParameters: rise_time must be >= 0");
}

double MagnetizationTrace::mu_par_bohr(std::size_t i, const UniversalConstants& uni) const {
  return longitudinal[i] / (n_c * uni.mu_B);
}

double MagnetizationTrace::mu_perp_bohr(std::size_t i, const UniversalConstants& uni) const {
  return transverse[i] / (n_c * uni.mu_B);
}

namespace {

double rise_factor(double t, double rise_time) {
  if (rise_time <= 0.0) return 1.0;
  return 1.0 - std::exp(-t / rise_time);
}

MagnetizationTrace make_trace(const GasConditions& gas, const TimeGrid& grid,
                              const UniversalConstants& uni) {
  MagnetizationTrace tr;
  tr.t0 = grid.t0;
  tr.dt = grid.dt;
  tr.longitudinal.assign(grid.n, 0.0);
  tr.transverse.assign(grid.n, 0.0);
  tr.n_c = number_density(gas, uni);
  return tr;
}

void require_nonnegative_grid(const TimeGrid& grid) {
  grid.validate();
  if (grid.t0 < 0.0)
    throw ValidationError("trace grid must start at t >= 0 (prepend any pre-trigger "
                          "region at the waveform level)");
}

}  // namespace

MagnetizationTrace transverse_trace(const TraceParameters& p, const GasConditions& gas,
                                    const TimeGrid& grid, const UniversalConstants& uni,
                                    Run run) {
  p.validate(uni);
  require_nonnegative_grid(grid);
  MagnetizationTrace tr = make_trace(gas, grid, uni);
  const double wp = p.freqs.omega_plus;
  const double wm = p.freqs.omega_minus;
  tr.omega_max = std::max(wp, wm);
  const double nc = tr.n_c;
  for_each_index(grid.n, run, [&](std::size_t i) {
    const double t = grid.t(i);
    const double mu =
        p.amplitude * (std::sin(wp * t) + std::sin(wm * t)) * std::exp(-t / p.tau);
    tr.transverse[i] = nc * mu;
  });
  return tr;
}

TransverseVectorTrace transverse_trace_vector(const TraceParameters& p,
                                              const GasConditions& gas,
                                              const TimeGrid& grid,
                                              const UniversalConstants& uni, Run run) {
  p.validate(uni);
  require_nonnegative_grid(grid);
  TransverseVectorTrace tr;
  tr.t0 = grid.t0;
  tr.dt = grid.dt;
  tr.in_phase.assign(grid.n, 0.0);
  tr.quadrature.assign(grid.n, 0.0);
  tr.n_c = number_density(gas, uni);
  const double wp = p.freqs.omega_plus;
  const double wm = p.freqs.omega_minus;
  const double nc = tr.n_c;
  for_each_index(grid.n, run, [&](std::size_t i) {
    const double t = grid.t(i);
    const double decay = std::exp(-t / p.tau);
    const double mu_y = p.amplitude * (std::sin(wp * t) + std::sin(wm * t)) * decay;
    const double mu_z = p.amplitude * (std::cos(wp * t) - std::cos(wm * t)) * decay;
    tr.in_phase[i] = nc * mu_y;
    tr.quadrature[i] = nc * mu_z;
  });
  return tr;
}

MagnetizationTrace longitudinal_trace_infield(const TraceParameters& p,
                                              const GasConditions& gas,
                                              const TimeGrid& grid,
                                              const UniversalConstants& uni, Run run) {
  p.validate(uni);
  require_nonnegative_grid(grid);
  MagnetizationTrace tr = make_trace(gas, grid, uni);
  const double wp = p.freqs.omega_plus;
  const double wm = p.freqs.omega_minus;
  tr.omega_max = std::max(wp, wm);
  const double nc = tr.n_c;
  for_each_index(grid.n, run, [&](std::size_t i) {
    const double t = grid.t(i);
    const double mu = p.amplitude * (std::cos(wp * t) + std::cos(wm * t)) *
                      std::exp(-t / p.tau) * rise_factor(t, p.rise_time);
    tr.longitudinal[i] = nc * mu;
  });
  return tr;
}

MagnetizationTrace longitudinal_trace_fieldfree(const TraceParameters& p,
                                                const GasConditions& gas,
                                                const TimeGrid& grid,
                                                const UniversalConstants& uni, Run run) {
  require_nonnegative_grid(grid);
  if (!(p.tau_plus > 0.0) || !(p.tau_minus > 0.0))
    throw ValidationError("field-free trace requires tau_plus and tau_minus > 0");
  if (p.bias_fraction < 0.0 || p.bias_fraction > 1.0)
    throw ValidationError("bias_fraction must lie in [0, 1]");
  MagnetizationTrace tr = make_trace(gas, grid, uni);
  const double scale = std::fabs(p.g_factor) * uni.mu_B;
  const double tau_mean = 0.5 * (p.tau_plus + p.tau_minus);
  const double nc = tr.n_c;
  for_each_index(grid.n, run, [&](std::size_t i) {
    const double t = grid.t(i);
    // Equal initial populations of the S_N = +1/-1 components decaying at
    // their own rates; the slower-decaying favorable component leaves a net
    // moment opposite to N, reported with the positive sign.
    const double tworate =
        (std::exp(-t / p.tau_plus) - std::exp(-t / p.tau_minus)) / 3.0;
    const double bias = p.bias_fraction * std::exp(-t / tau_mean);
    tr.longitudinal[i] =
        nc * scale * (tworate + bias) * rise_factor(t, p.rise_time);
  });
  return tr;
}

double boltzmann_imbalance(int n, double temperature, const MolecularConstants& mol,
                           const UniversalConstants& uni) {
  if (n < 1) throw ValidationError("boltzmann_imbalance: N must be >= 1");
  if (!(temperature > 0.0)) throw ValidationError("boltzmann_imbalance: T must be positive");
  mol.validate();
  const double de =
      zero_field_energy(n, Branch::plus, mol) - zero_field_energy(n, Branch::minus, mol);
  return std::tanh(std::fabs(de) / (uni.k_B * temperature));
}

std::vector<double> flux_density(const std::vector<double>& magnetization,
                                 const UniversalConstants& uni) {
  std::vector<double> b(magnetization.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = uni.mu_0 * magnetization[i];
  return b;
}

std::size_t correlation_lag_samples(const std::vector<double>& a,
                                    const std::vector<double>& b,
                                    std::size_t max_shift) {
  if (a.size() != b.size() || a.empty())
    throw ValidationError("correlation_lag_samples: size mismatch or empty input");
  max_shift = std::min(max_shift, a.size() - 1);
  std::size_t best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= max_shift; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + k < a.size(); ++i) acc += a[i] * b[i + k];
    if (acc > best) {
      best = acc;
      best_k = k;
    }
  }
  return best_k;
}

void write_trace_csv(const std::string& path, const MagnetizationTrace& tr,
                     const UniversalConstants& uni) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "time_s,m_par_A_per_m,m_perp_A_per_m,mu_par_bohr,mu_perp_bohr\n";
  char line[200];
  for (std::size_t i = 0; i < tr.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", tr.t(i),
                  tr.longitudinal[i], tr.transverse[i], tr.mu_par_bohr(i, uni),
                  tr.mu_perp_bohr(i, uni));
    out << line;
  }
  if (!out) throw Error("write failure on " + path);
}

}  // namespace srm
