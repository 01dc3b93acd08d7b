#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "srm/errors.hpp"
#include "srm/fit.hpp"
#include "srm/spectrum.hpp"

using namespace srm;

namespace {

const MolecularConstants kMol = MolecularConstants::oxygen();

Waveform model_waveform(double amplitude, double tau, double wp, double wm,
                        std::size_t n = 8000, double dt = 1.5e-12,
                        double t0 = -1e-9) {
  Waveform w;
  w.t0 = t0;
  w.dt = dt;
  w.unit = WaveUnit::volt;
  w.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = emf_model(w.t(i), amplitude, tau, wp, wm);
  return w;
}

PrecessionFrequencies freqs_at(int n, double b) {
  RotorFieldConfig cfg;
  cfg.n = n;
  cfg.b_tesla = b;
  return frequencies_exact(cfg, kMol);
}

}  // namespace

TEST_CASE("analytic jacobian matches central finite differences") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double a = 1e-5 + 1e-4 * u(rng);
    const double tau = (1.0 + 4.0 * u(rng)) * 1e-9;
    const double wp = (1.0 + 3.0 * u(rng)) * 1e9;
    const double wm = (1.0 + 3.0 * u(rng)) * 1e9;
    const double t = 5e-9 * u(rng);
    double jac[4];
    emf_model_jacobian(t, a, tau, wp, wm, jac);
    const double steps[4] = {a * 1e-6, tau * 1e-6, wp * 1e-6, wm * 1e-6};
    double p[4] = {a, tau, wp, wm};
    for (int k = 0; k < 4; ++k) {
      double hi[4] = {p[0], p[1], p[2], p[3]};
      double lo[4] = {p[0], p[1], p[2], p[3]};
      hi[k] += steps[k];
      lo[k] -= steps[k];
      const double fd = (emf_model(t, hi[0], hi[1], hi[2], hi[3]) -
                         emf_model(t, lo[0], lo[1], lo[2], lo[3])) /
                        (2.0 * steps[k]);
      const double scale =
          std::max(std::fabs(jac[k]), std::fabs(a * (wp + wm)) / steps[k] * 1e-10);
      CHECK(std::fabs(jac[k] - fd) <= 1e-6 * std::max(scale, 1e-30));
    }
  }
}

TEST_CASE("model vanishes before the trigger") {
  CHECK(emf_model(-1e-12, 1.0, 1e-9, 2e9, 2e9) == 0.0);
  CHECK(emf_model(0.0, 1.0, 1e-9, 2e9, 2e9) != 0.0);
}

TEST_CASE("noiseless self-inversion recovers amplitude and tau to 1e-6") {
  const PrecessionFrequencies f = freqs_at(61, 1.0);
  const double a_true = 3.7e-13;
  const double tau_true = 2.4e-9;
  const Waveform w = model_waveform(a_true, tau_true, f.omega_plus, f.omega_minus);

  FitSeed seed;
  seed.amplitude = a_true * 1.4;  // intentionally off
  seed.tau = tau_true * 0.7;
  seed.omega_plus = f.omega_plus;
  seed.omega_minus = f.omega_minus;
  const FitResult r = fit_emf_model(w, seed, FitMode::frequencies_fixed);
  CHECK(r.converged);
  CHECK(std::fabs(r.amplitude - a_true) <= 1e-6 * a_true);
  CHECK(std::fabs(r.tau - tau_true) <= 1e-6 * tau_true);
  CHECK(r.residual_rms <= 1e-8 * a_true * (f.omega_plus + f.omega_minus));
}

TEST_CASE("frequencies-free mode recovers the split frequencies") {
  const PrecessionFrequencies f = freqs_at(71, 1.0);
  const Waveform w = model_waveform(2e-13, 3.1e-9, f.omega_plus, f.omega_minus);
  FitSeed seed;
  seed.amplitude = 1.5e-13;
  seed.tau = 2.0e-9;
  seed.omega_plus = f.omega_plus * 1.02;
  seed.omega_minus = f.omega_minus * 0.98;
  const FitResult r = fit_emf_model(w, seed, FitMode::frequencies_free);
  CHECK(r.converged);
  // the model is symmetric under swapping the two branches; compare sorted
  const double lo_true = std::min(f.omega_plus, f.omega_minus);
  const double hi_true = std::max(f.omega_plus, f.omega_minus);
  const double lo_fit = std::min(r.omega_plus, r.omega_minus);
  const double hi_fit = std::max(r.omega_plus, r.omega_minus);
  CHECK(std::fabs(lo_fit - lo_true) <= 1e-4 * lo_true);
  CHECK(std::fabs(hi_fit - hi_true) <= 1e-4 * hi_true);
  CHECK(std::fabs(r.tau - 3.1e-9) <= 1e-4 * 3.1e-9);
}

TEST_CASE("forcing equal frequencies on split data leaves a larger residual") {
  const PrecessionFrequencies exact = freqs_at(71, 1.0);
  const Waveform w = model_waveform(2e-13, 3.1e-9, exact.omega_plus, exact.omega_minus);

  FitSeed seed_exact;
  seed_exact.amplitude = 2e-13;
  seed_exact.tau = 3.1e-9;
  seed_exact.omega_plus = exact.omega_plus;
  seed_exact.omega_minus = exact.omega_minus;
  const FitResult good = fit_emf_model(w, seed_exact, FitMode::frequencies_fixed);

  RotorFieldConfig cfg;
  cfg.n = 71;
  cfg.b_tesla = 1.0;
  const PrecessionFrequencies eq2 = frequencies_approximate(cfg, kMol);
  FitSeed seed_eq2 = seed_exact;
  seed_eq2.omega_plus = eq2.omega_plus;
  seed_eq2.omega_minus = eq2.omega_minus;
  const FitResult forced = fit_emf_model(w, seed_eq2, FitMode::frequencies_fixed);

  CHECK(forced.residual_rms > 10.0 * good.residual_rms);
}

TEST_CASE("fits are deterministic and never worsen the seed residual") {
  const PrecessionFrequencies f = freqs_at(43, 1.0);
  Waveform w = model_waveform(1e-13, 1.8e-9, f.omega_plus, f.omega_minus);
  w = add_noise(w, 20.0, 31);
  FitSeed seed;
  seed.amplitude = 1.2e-13;
  seed.tau = 1.5e-9;
  seed.omega_plus = f.omega_plus;
  seed.omega_minus = f.omega_minus;
  const FitResult r1 = fit_emf_model(w, seed, FitMode::frequencies_fixed);
  const FitResult r2 = fit_emf_model(w, seed, FitMode::frequencies_fixed);
  CHECK(r1.amplitude == r2.amplitude);
  CHECK(r1.tau == r2.tau);
  CHECK(r1.residual_rms == r2.residual_rms);
  CHECK(r1.iterations == r2.iterations);

  // residual at the optimum does not exceed the residual at the seed
  double seed_chi2 = 0.0;
  std::size_t n_fit = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.t(i) < 0.0) continue;
    const double r = emf_model(w.t(i), seed.amplitude, seed.tau, seed.omega_plus,
                                   seed.omega_minus) -
                     w.samples[i];
    seed_chi2 += r * r;
    ++n_fit;
  }
  CHECK(r1.residual_rms <= std::sqrt(seed_chi2 / static_cast<double>(n_fit)));
}

TEST_CASE("uncertainties cover the truth at 20 dB noise") {
  const PrecessionFrequencies f = freqs_at(61, 1.0);
  const double tau_true = 2.4e-9;
  const Waveform clean = model_waveform(2e-13, tau_true, f.omega_plus, f.omega_minus);
  FitSeed fallback;
  fallback.amplitude = 2e-13;
  fallback.tau = tau_true;
  fallback.omega_plus = f.omega_plus;
  fallback.omega_minus = f.omega_minus;
  const std::vector<FitResult> ens =
      fit_ensemble(clean, 20.0, 40, 777, fallback, FitMode::frequencies_fixed);
  int covered = 0;
  for (const FitResult& r : ens) {
    CHECK(r.converged);
    if (std::fabs(r.tau - tau_true) <= 3.0 * r.sigma_tau) ++covered;
  }
  CHECK(covered >= 36);  // 3-sigma coverage on 40 draws
}

TEST_CASE("ensemble results are keyed by seed, independent of execution order") {
  const PrecessionFrequencies f = freqs_at(43, 1.0);
  const Waveform clean = model_waveform(1e-13, 1.8e-9, f.omega_plus, f.omega_minus,
                                        4000, 2e-12);
  FitSeed fallback;
  fallback.amplitude = 1e-13;
  fallback.tau = 1.8e-9;
  fallback.omega_plus = f.omega_plus;
  fallback.omega_minus = f.omega_minus;
  const auto serial =
      fit_ensemble(clean, 20.0, 16, 5, fallback, FitMode::frequencies_fixed, Run::serial);
  const auto parallel = fit_ensemble(clean, 20.0, 16, 5, fallback,
                                     FitMode::frequencies_fixed, Run::parallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].tau == parallel[i].tau);
    CHECK(serial[i].amplitude == parallel[i].amplitude);
  }
}

TEST_CASE("initial guess lands within 30% on clean waveforms") {
  const double w0 = 2.4e9;
  const double a_true = 5e-13;
  const double tau_true = 2.8e-9;
  const Waveform w = model_waveform(a_true, tau_true, w0, w0);
  const FitSeed seed = initial_guess(w);
  CHECK(std::fabs(seed.omega_plus - w0) <= 0.3 * w0);
  CHECK(std::fabs(seed.tau - tau_true) <= 0.3 * tau_true);
  CHECK(std::fabs(seed.amplitude - a_true) <= 0.3 * a_true);
}

TEST_CASE("initial guess fails loudly on monotone input") {
  Waveform w;
  w.t0 = 0.0;
  w.dt = 1e-12;
  w.unit = WaveUnit::volt;
  w.samples.resize(2000);
  for (std::size_t i = 0; i < w.size(); ++i)
    w.samples[i] = std::exp(-w.t(i) / 2e-9);
  CHECK_THROWS_AS(initial_guess(w), HeuristicError);
}

TEST_CASE("initial guess scales homogeneously with the waveform") {
  const double w0 = 2.0e9;
  Waveform w = model_waveform(3e-13, 2.2e-9, w0, w0);
  Waveform w10 = w;
  for (double& s : w10.samples) s *= 10.0;
  const FitSeed a = initial_guess(w);
  const FitSeed b = initial_guess(w10);
  CHECK(b.amplitude == doctest::Approx(10.0 * a.amplitude).epsilon(1e-12));
  CHECK(b.tau == doctest::Approx(a.tau).epsilon(1e-12));
  CHECK(b.omega_plus == doctest::Approx(a.omega_plus).epsilon(1e-12));
}

TEST_CASE("preconditions are enforced") {
  const PrecessionFrequencies f = freqs_at(61, 1.0);
  const Waveform w = model_waveform(2e-13, 2.4e-9, f.omega_plus, f.omega_minus);
  FitSeed seed;
  seed.amplitude = 2e-13;
  seed.tau = -1.0;
  seed.omega_plus = f.omega_plus;
  seed.omega_minus = f.omega_minus;
  CHECK_THROWS_AS(fit_emf_model(w, seed, FitMode::frequencies_fixed), ValidationError);
  seed.tau = 2.4e-9;
  // fewer than two periods in the record
  const Waveform tiny = model_waveform(2e-13, 2.4e-9, f.omega_plus, f.omega_minus,
                                       200, 1.5e-12, 0.0);
  CHECK_THROWS_AS(fit_emf_model(tiny, seed, FitMode::frequencies_fixed), ValidationError);
}
