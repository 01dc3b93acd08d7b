#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "srm/parallel.hpp"
#include "srm/spectrum.hpp"
#include "srm/units.hpp"

namespace srm {

struct GasConditions {
  double pressure = 0.5e5;    // Pa
  double temperature = 295.0; // K
  double eta = 0.04;          // centrifuged fraction

  void validate() const;
};

// Number density of centrifuged molecules, eta P / (k_B T).
double number_density(const GasConditions& gas, const UniversalConstants& uni = codata);

struct TimeGrid {
  double t0 = 0.0;
  double dt = 1e-12;
  std::size_t n = 10000;

  double t(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double t_end() const { return t(n ? n - 1 : 0); }
  void validate() const;
};

struct TraceParameters {
  double amplitude = 0.0;       // per-molecule moment scale, J/T
  double tau = 3.1e-9;          // common decay time, s
  PrecessionFrequencies freqs;  // either method
  double rise_time = 0.0;       // s; 0 disables the 1 - e^(-t/rise) factor
  double tau_plus = 0.0;        // s, S_N = +1 population decay (field-free model)
  double tau_minus = 0.0;       // s, S_N = -1 population decay
  double bias_fraction = 0.0;   // thermal imbalance weight in the field-free model
  double g_factor = -2.0023;    // sets the |g| mu_B moment scale and the physical bound

  void validate(const UniversalConstants& uni = codata) const;
};

// Ensemble magnetization on a uniform grid. Channels are stored in A/m;
// per-molecule values in Bohr magnetons are derived via n_c.
struct MagnetizationTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> longitudinal;  // M_par, A/m, +x projection
  std::vector<double> transverse;    // M_perp, A/m, +y projection
  double n_c = 0.0;                  // 1/m^3
  double omega_max = 0.0;            // rad/s; 0 for non-oscillatory traces

  std::size_t size() const { return longitudinal.size(); }
  double t(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double mu_par_bohr(std::size_t i, const UniversalConstants& uni = codata) const;
  double mu_perp_bohr(std::size_t i, const UniversalConstants& uni = codata) const;
};

// Per-molecule transverse moment amplitude * (sin w+ t + sin w- t) e^(-t/tau),
// scaled to M_perp by n_c.
MagnetizationTrace transverse_trace(const TraceParameters& p, const GasConditions& gas,
                                    const TimeGrid& grid,
                                    const UniversalConstants& uni = codata,
                                    Run run = Run::parallel);

// Vector-resolved transverse kernel. The two branches precess in opposite
// senses with antiparallel starting moments: the in-phase channel is the
// scalar two-branch kernel, the quadrature channel carries
// cos(w+ t) - cos(w- t) and vanishes when the frequencies coincide.
struct TransverseVectorTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> in_phase;    // A/m, same content as transverse_trace
  std::vector<double> quadrature;  // A/m
  double n_c = 0.0;
};

TransverseVectorTrace transverse_trace_vector(const TraceParameters& p,
                                              const GasConditions& gas,
                                              const TimeGrid& grid,
                                              const UniversalConstants& uni = codata,
                                              Run run = Run::parallel);

// In-field longitudinal moment: cosine counterpart of the transverse kernel
// (quarter-period phase lead) gated by the fast field-on rise factor.
MagnetizationTrace longitudinal_trace_infield(const TraceParameters& p,
                                              const GasConditions& gas,
                                              const TimeGrid& grid,
                                              const UniversalConstants& uni = codata,
                                              Run run = Run::parallel);

// Field-free longitudinal moment from the two-rate collisional model plus an
// optional thermal-imbalance term:
//   mu(t) = |g| mu_B [ (e^(-t/tau+) - e^(-t/tau-))/3
//                      + bias e^(-2t/(tau+ + tau-)) ] (1 - e^(-t/rise)).
MagnetizationTrace longitudinal_trace_fieldfree(const TraceParameters& p,
                                                const GasConditions& gas,
                                                const TimeGrid& grid,
                                                const UniversalConstants& uni = codata,
                                                Run run = Run::parallel);

// tanh(|dE|/k_B T) with dE the zero-field splitting between the S_N = +1 and
// S_N = -1 branches at fixed N.
double boltzmann_imbalance(int n, double temperature, const MolecularConstants& mol,
                           const UniversalConstants& uni = codata);

// Elementwise mu_0 M.
std::vector<double> flux_density(const std::vector<double>& magnetization,
                                 const UniversalConstants& uni = codata);

// Number of samples by which b must be advanced to best align with a:
// argmax over k in [0, max_shift] of sum_i a[i] b[i+k].
std::size_t correlation_lag_samples(const std::vector<double>& a,
                                    const std::vector<double>& b,
                                    std::size_t max_shift);

void write_trace_csv(const std::string& path, const MagnetizationTrace& tr,
                     const UniversalConstants& uni = codata);

}  // namespace srm
