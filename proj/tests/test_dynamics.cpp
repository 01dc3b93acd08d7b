#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "srm/dynamics.hpp"
#include "srm/errors.hpp"

using namespace srm;

namespace {

const MolecularConstants kMol = MolecularConstants::oxygen();

PrecessionFrequencies equal_freqs(double w) {
  PrecessionFrequencies f;
  f.omega_plus = f.omega_minus = w;
  return f;
}

}  // namespace

TEST_CASE("number density follows eta P / (k_B T)") {
  GasConditions gas;
  gas.pressure = 1e5;
  gas.temperature = 295.0;
  gas.eta = 0.04;
  const double nc = number_density(gas);
  CHECK(nc == doctest::Approx(0.04 * 1e5 / (codata.k_B * 295.0)).epsilon(1e-15));
  // headline: about 1e18 per cm^3, above the 6e17 detection estimate
  CHECK(nc * 1e-6 >= 6e17);
  CHECK(nc * 1e-6 == doctest::Approx(9.82e17).epsilon(1e-3));

  gas.pressure = 0.5e5;
  CHECK(number_density(gas) * 1e-6 == doctest::Approx(4.91e17).epsilon(1e-3));

  gas.pressure = 1e-6;
  CHECK(number_density(gas) < 1e13);  // vanishes with P
  gas.pressure = 0.0;
  CHECK_THROWS_AS(number_density(gas), ValidationError);
}

TEST_CASE("transverse kernel peaks at 2/3 |g| mu_B on the quarter period") {
  TraceParameters p;
  p.amplitude = std::fabs(kMol.g_factor) * codata.mu_B / 3.0;
  p.tau = std::numeric_limits<double>::infinity();
  const double w = 1.97847e9;
  p.freqs = equal_freqs(w);
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 1e-13;
  grid.n = 20000;
  const MagnetizationTrace tr = transverse_trace(p, gas, grid);

  double peak = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.transverse[i] > peak) {
      peak = tr.transverse[i];
      at = i;
    }
  const double mu_peak = peak / tr.n_c;
  CHECK(mu_peak ==
        doctest::Approx(2.0 / 3.0 * std::fabs(kMol.g_factor) * codata.mu_B)
            .epsilon(1e-6));
  CHECK(mu_peak / codata.mu_B == doctest::Approx(1.335).epsilon(1e-3));
  CHECK(std::fabs(tr.t(at) - M_PI / (2.0 * w)) <= grid.dt);
  CHECK(tr.transverse[0] == 0.0);
  for (std::size_t i = 0; i < tr.size(); ++i) CHECK(tr.longitudinal[i] == 0.0);
}

TEST_CASE("transverse trace respects the pointwise envelope bound") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 2e-12;
  grid.n = 3000;
  for (int rep = 0; rep < 20; ++rep) {
    TraceParameters p;
    p.amplitude = u(rng) * codata.mu_B;
    p.tau = (0.5 + 4.0 * u(rng)) * 1e-9;
    PrecessionFrequencies f;
    f.omega_plus = 4e9 * u(rng);
    f.omega_minus = 4e9 * u(rng);
    p.freqs = f;
    const MagnetizationTrace tr = transverse_trace(p, gas, grid);
    const double bound_scale = 2.0 * std::fabs(p.g_factor) * codata.mu_B;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const double mu = tr.transverse[i] / tr.n_c;
      CHECK(std::fabs(mu) <=
            2.0 * p.amplitude * std::exp(-tr.t(i) / p.tau) * (1.0 + 1e-12));
      CHECK(std::fabs(mu) <= bound_scale);
    }
  }
}

TEST_CASE("per-molecule amplitude above |g| mu_B is rejected") {
  TraceParameters p;
  p.amplitude = 1.01 * std::fabs(p.g_factor) * codata.mu_B;
  p.freqs = equal_freqs(1e9);
  GasConditions gas;
  TimeGrid grid;
  CHECK_THROWS_AS(transverse_trace(p, gas, grid), ValidationError);
}

TEST_CASE("negative-time grids are rejected for traces") {
  TraceParameters p;
  p.amplitude = codata.mu_B / 3.0;
  p.freqs = equal_freqs(1e9);
  GasConditions gas;
  TimeGrid grid;
  grid.t0 = -1e-9;
  CHECK_THROWS_AS(transverse_trace(p, gas, grid), ValidationError);
}

TEST_CASE("transverse magnetization scales exactly with pressure") {
  TraceParameters p;
  p.amplitude = 0.65 * codata.mu_B;
  p.tau = 3e-9;
  p.freqs = equal_freqs(2e9);
  TimeGrid grid;
  grid.dt = 1e-12;
  grid.n = 2000;
  GasConditions lo, hi;
  lo.pressure = 0.25e5;
  hi.pressure = 0.5e5;
  const MagnetizationTrace a = transverse_trace(p, lo, grid);
  const MagnetizationTrace b = transverse_trace(p, hi, grid);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.transverse[i] == 0.0) {
      CHECK(b.transverse[i] == 0.0);
    } else {
      CHECK(std::fabs(b.transverse[i] / a.transverse[i] - 2.0) <= 1e-12);
    }
  }
}

TEST_CASE("spectral content sits at the two branch frequencies") {
  TraceParameters p;
  p.amplitude = 0.3 * codata.mu_B;
  p.tau = 50e-9;  // at least 10 oscillation periods
  PrecessionFrequencies f;
  f.omega_plus = 2.0e9;
  f.omega_minus = 2.2e9;
  p.freqs = f;
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 100e-9 / 4096;
  grid.n = 4096;
  const MagnetizationTrace tr = transverse_trace(p, gas, grid);

  const double df = 1.0 / (grid.dt * static_cast<double>(grid.n));
  const auto k_plus = static_cast<long long>(
      std::floor(f.omega_plus / (2.0 * M_PI) / df + 0.5));
  const auto k_minus = static_cast<long long>(
      std::floor(f.omega_minus / (2.0 * M_PI) / df + 0.5));
  std::vector<double> mags(grid.n / 2, 0.0);
  for (std::size_t k = 1; k < grid.n / 2; ++k)
    mags[k] = oracles::dft_magnitude(tr.transverse, k);
  std::size_t best = 1;
  for (std::size_t k = 2; k < mags.size(); ++k)
    if (mags[k] > mags[best]) best = k;
  std::size_t second = (best > 3) ? 1 : best + 2;
  for (std::size_t k = 2; k < mags.size(); ++k) {
    if (k + 1 >= best && k <= best + 1) continue;
    if (mags[k] > mags[second]) second = k;
  }
  const long long lo = static_cast<long long>(std::min(best, second));
  const long long hi = static_cast<long long>(std::max(best, second));
  CHECK(std::llabs(lo - k_plus) <= 1);
  CHECK(std::llabs(hi - k_minus) <= 1);
}

TEST_CASE("vector-resolved kernel separates the counter-precessing senses") {
  TraceParameters p;
  p.amplitude = 0.3 * codata.mu_B;
  p.tau = 4e-9;
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 2e-12;
  grid.n = 4000;

  // equal frequencies: the quadrature channel cancels exactly
  p.freqs = equal_freqs(2.2e9);
  const TransverseVectorTrace eq = transverse_trace_vector(p, gas, grid);
  for (std::size_t i = 0; i < eq.in_phase.size(); ++i) CHECK(eq.quadrature[i] == 0.0);

  // split frequencies: in-phase channel equals the scalar kernel, and the
  // total vector stays inside the two-moment envelope
  PrecessionFrequencies f;
  f.omega_plus = 2.2e9;
  f.omega_minus = 2.04e9;
  p.freqs = f;
  const TransverseVectorTrace vec = transverse_trace_vector(p, gas, grid);
  const MagnetizationTrace scalar = transverse_trace(p, gas, grid);
  const double scale = 2.0 * p.amplitude * vec.n_c;
  for (std::size_t i = 0; i < vec.in_phase.size(); ++i) {
    // the two loop bodies may vectorize differently, so allow ulp-level slack
    CHECK(std::fabs(vec.in_phase[i] - scalar.transverse[i]) <= 1e-14 * scale);
    const double mag = std::sqrt(vec.in_phase[i] * vec.in_phase[i] +
                                 vec.quadrature[i] * vec.quadrature[i]);
    CHECK(mag <= 2.0 * p.amplitude * vec.n_c * std::exp(-grid.t(i) / p.tau) *
                     (1.0 + 1e-12));
  }
}

TEST_CASE("in-field longitudinal trace rises from zero and tracks the cosine pair") {
  TraceParameters p;
  p.amplitude = 0.1 * codata.mu_B;
  p.tau = 5e-9;
  p.rise_time = 0.25e-9;
  const double w = 2.2e9;
  p.freqs = equal_freqs(w);
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 2e-12;
  grid.n = 5000;
  const MagnetizationTrace lt = longitudinal_trace_infield(p, gas, grid);
  CHECK(lt.longitudinal[0] == 0.0);
  for (std::size_t i = 0; i < lt.size(); ++i) CHECK(lt.transverse[i] == 0.0);

  const MagnetizationTrace tt = transverse_trace(p, gas, grid);
  auto mean_peak_spacing = [&](const std::vector<double>& v) {
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
      if (v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > 0.0)
        peaks.push_back(grid.t(i));
    double acc = 0.0;
    for (std::size_t i = 1; i < peaks.size(); ++i) acc += peaks[i] - peaks[i - 1];
    return acc / static_cast<double>(peaks.size() - 1);
  };
  const double s_l = mean_peak_spacing(lt.longitudinal);
  const double s_t = mean_peak_spacing(tt.transverse);
  CHECK(s_l == doctest::Approx(s_t).epsilon(2e-2));
  CHECK(s_l == doctest::Approx(2.0 * M_PI / w).epsilon(2e-2));
}

TEST_CASE("longitudinal and transverse oscillations sit a quarter period apart") {
  TraceParameters p;
  p.amplitude = 0.2 * codata.mu_B;
  p.tau = 100e-9;
  p.rise_time = 0.25e-9;
  const double w = 1.97847e9;
  p.freqs = equal_freqs(w);
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 2e-11;
  grid.n = 10000;
  const MagnetizationTrace lt = longitudinal_trace_infield(p, gas, grid);
  const MagnetizationTrace tt = transverse_trace(p, gas, grid);
  const double period = 2.0 * M_PI / w;
  const std::size_t max_shift = static_cast<std::size_t>(period / grid.dt);
  const std::size_t lag =
      correlation_lag_samples(lt.longitudinal, tt.transverse, max_shift);
  CHECK(std::fabs(static_cast<double>(lag) * grid.dt - 0.25 * period) <= grid.dt);
}

TEST_CASE("two-rate field-free model peaks at the closed-form value") {
  TraceParameters p;
  p.tau_minus = 1e-9;
  p.tau_plus = 1.5e-9;
  p.rise_time = 0.0;  // R = 1
  p.bias_fraction = 0.0;
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 1e-13;
  grid.n = 60000;
  const MagnetizationTrace tr = longitudinal_trace_fieldfree(p, gas, grid);

  double peak = 0.0;
  std::size_t at = 0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.longitudinal[i] > peak) {
      peak = tr.longitudinal[i];
      at = i;
    }
  const double expected_peak = std::fabs(p.g_factor) * codata.mu_B *
                               oracles::two_rate_peak_fraction(1.5);
  const double expected_time = oracles::two_rate_peak_time(p.tau_minus, 1.5);
  CHECK(peak / tr.n_c == doctest::Approx(expected_peak).epsilon(1e-6));
  CHECK(std::fabs(tr.t(at) - expected_time) <= grid.dt);
  CHECK(peak / tr.n_c / codata.mu_B == doctest::Approx(0.0989).epsilon(2e-3));
  CHECK(std::fabs(expected_time - 3.0 * p.tau_minus * std::log(1.5)) <= 1e-20);
}

TEST_CASE("equal decay rates cancel the two-rate term") {
  TraceParameters p;
  p.tau_minus = 2e-9;
  p.tau_plus = 2e-9;
  p.rise_time = 1e-9;
  p.bias_fraction = 0.0;
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 1e-12;
  grid.n = 5000;
  const MagnetizationTrace tr = longitudinal_trace_fieldfree(p, gas, grid);
  for (std::size_t i = 0; i < tr.size(); ++i) CHECK(tr.longitudinal[i] == 0.0);
}

TEST_CASE("boltzmann imbalance matches the closed-form splitting at N=33") {
  const double f = boltzmann_imbalance(33, 295.0, kMol);
  // |dE| = |gamma (2N+1) + lambda (2N+1)/(N(N+1))| from the B=0 energies
  const double de =
      std::fabs(kMol.gamma * 67.0 + kMol.lambda * 67.0 / (33.0 * 34.0));
  CHECK(f == doctest::Approx(std::tanh(de / (codata.k_B * 295.0))).epsilon(1e-12));
  CHECK(f == doctest::Approx(0.002175).epsilon(1e-3));
  CHECK(f > 0.002);
  CHECK(f < 0.004);
}

TEST_CASE("boltzmann imbalance limits") {
  CHECK(boltzmann_imbalance(33, 1e12, kMol) < 1e-9);
  CHECK(boltzmann_imbalance(89, 295.0, kMol) > boltzmann_imbalance(33, 295.0, kMol));
  CHECK(boltzmann_imbalance(33, 1e-3, kMol) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(boltzmann_imbalance(0, 295.0, kMol), ValidationError);
}

TEST_CASE("flux density is mu_0 M elementwise") {
  GasConditions gas;
  gas.pressure = 0.5e5;
  const double nc = number_density(gas);
  const double m_perp = nc * 0.65 * codata.mu_B;
  const std::vector<double> b = flux_density({0.0, m_perp, -m_perp});
  CHECK(b[0] == 0.0);
  CHECK(b[1] == doctest::Approx(3.72e-6).epsilon(2e-3));  // roughly 37 mG
  CHECK(b[1] == -b[2]);
  gas.pressure = 1e5;
  const double b2 = flux_density({number_density(gas) * 0.65 * codata.mu_B})[0];
  CHECK(b2 / b[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("serial and parallel trace synthesis agree bit for bit") {
  TraceParameters p;
  p.amplitude = 0.5 * codata.mu_B;
  p.tau = 2e-9;
  PrecessionFrequencies f;
  f.omega_plus = 2.4e9;
  f.omega_minus = 2.5e9;
  p.freqs = f;
  p.rise_time = 0.3e-9;
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 1e-12;
  grid.n = 20000;
  const MagnetizationTrace a = transverse_trace(p, gas, grid, codata, Run::serial);
  const MagnetizationTrace b = transverse_trace(p, gas, grid, codata, Run::parallel);
  const MagnetizationTrace c =
      longitudinal_trace_infield(p, gas, grid, codata, Run::serial);
  const MagnetizationTrace d =
      longitudinal_trace_infield(p, gas, grid, codata, Run::parallel);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.transverse[i] == b.transverse[i]);
    CHECK(c.longitudinal[i] == d.longitudinal[i]);
  }
}

TEST_CASE("trace CSV export carries the five columns") {
  TraceParameters p;
  p.amplitude = 0.1 * codata.mu_B;
  p.tau = 2e-9;
  p.freqs = equal_freqs(2e9);
  GasConditions gas;
  TimeGrid grid;
  grid.dt = 1e-12;
  grid.n = 64;
  const MagnetizationTrace tr = transverse_trace(p, gas, grid);
  const char* path = "trace_test.csv";
  write_trace_csv(path, tr);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "time_s,m_par_A_per_m,m_perp_A_per_m,mu_par_bohr,mu_perp_bohr");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == grid.n);
  std::remove(path);
}
