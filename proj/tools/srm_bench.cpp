// Serial vs OpenMP timings for the data-parallel kernels, with a
// bit-identity check between the two paths.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "srm/coil.hpp"
#include "srm/dynamics.hpp"
#include "srm/fit.hpp"
#include "srm/spectrum.hpp"

using namespace srm;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Row {
  const char* name;
  double serial_ms;
  double parallel_ms;
  double max_delta;
};

void print(const Row& r) {
  std::printf("%-28s %10.1f ms %10.1f ms   x%-5.2f  max|delta| = %.3g\n", r.name,
              r.serial_ms, r.parallel_ms,
              r.parallel_ms > 0 ? r.serial_ms / r.parallel_ms : 0.0, r.max_delta);
}

template <class F>
double timed(F&& f) {
  const double t0 = now_ms();
  f();
  return now_ms() - t0;
}

}  // namespace

int main() {
  const MolecularConstants mol = MolecularConstants::oxygen();
  std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

  {
    RotorFieldConfig cfg;
    cfg.n = 89;
    cfg.b_tesla = 1.0;
    SpinRotationSpectrum s1, s2;
    Row r{"diagonalize N=89 blocks", 0, 0, 0};
    r.serial_ms = timed([&] { s1 = diagonalize(cfg, mol, codata, Run::serial); });
    r.parallel_ms = timed([&] { s2 = diagonalize(cfg, mol, codata, Run::parallel); });
    for (std::size_t b = 0; b < s1.blocks.size(); ++b)
      for (int k = 0; k < s1.blocks[b].dim; ++k)
        r.max_delta = std::max(r.max_delta,
                               std::fabs(s1.blocks[b].energy[k] - s2.blocks[b].energy[k]));
    print(r);
  }

  {
    RotorFieldConfig rcfg;
    rcfg.n = 89;
    rcfg.b_tesla = 1.0;
    TraceParameters p;
    p.amplitude = codata.mu_B / 3.0;
    p.tau = 4e-9;
    p.freqs = frequencies_approximate(rcfg, mol);
    GasConditions gas;
    TimeGrid grid;
    grid.dt = 5e-15;
    grid.n = 4'000'000;
    MagnetizationTrace t1, t2;
    Row r{"transverse trace 4M pts", 0, 0, 0};
    r.serial_ms = timed([&] { t1 = transverse_trace(p, gas, grid, codata, Run::serial); });
    r.parallel_ms =
        timed([&] { t2 = transverse_trace(p, gas, grid, codata, Run::parallel); });
    for (std::size_t i = 0; i < t1.size(); ++i)
      r.max_delta = std::max(r.max_delta, std::fabs(t1.transverse[i] - t2.transverse[i]));
    print(r);
  }

  {
    const CoilGeometry coil = CoilGeometry::transverse_default();
    const SampleModel sample = SampleModel::beam_line(4e-3, 501);
    CouplingResult c1, c2;
    Row r{"coupling 501 dipoles", 0, 0, 0};
    r.serial_ms = timed(
        [&] { c1 = coupling_coefficient(coil, sample, unit_y(), codata, 1e-8, Run::serial); });
    r.parallel_ms = timed(
        [&] { c2 = coupling_coefficient(coil, sample, unit_y(), codata, 1e-8, Run::parallel); });
    r.max_delta = std::fabs(c1.c - c2.c);
    print(r);
  }

  {
    RotorFieldConfig rcfg;
    rcfg.n = 61;
    rcfg.b_tesla = 1.0;
    const PrecessionFrequencies freqs = frequencies_exact(rcfg, mol);
    Waveform clean;
    clean.t0 = 0.0;
    clean.dt = 2e-12;
    clean.unit = WaveUnit::volt;
    clean.samples.resize(5000);
    for (std::size_t i = 0; i < clean.samples.size(); ++i)
      clean.samples[i] = emf_model(clean.t(i), 1e-13, 2.4e-9, freqs.omega_plus,
                                       freqs.omega_minus);
    FitSeed fallback;
    fallback.amplitude = 1e-13;
    fallback.tau = 2.4e-9;
    fallback.omega_plus = freqs.omega_plus;
    fallback.omega_minus = freqs.omega_minus;
    std::vector<FitResult> f1, f2;
    Row r{"fit ensemble 64 seeds", 0, 0, 0};
    r.serial_ms = timed([&] {
      f1 = fit_ensemble(clean, 20.0, 64, 7, fallback, FitMode::frequencies_fixed,
                        Run::serial);
    });
    r.parallel_ms = timed([&] {
      f2 = fit_ensemble(clean, 20.0, 64, 7, fallback, FitMode::frequencies_fixed,
                        Run::parallel);
    });
    for (std::size_t i = 0; i < f1.size(); ++i)
      r.max_delta = std::max(r.max_delta, std::fabs(f1[i].tau - f2[i].tau));
    print(r);
  }
  return 0;
}
