#include "srm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "srm/errors.hpp"

namespace srm {

double emf_model(double t, double amplitude, double tau, double omega_plus,
                     double omega_minus) {
  if (t < 0.0) return 0.0;
  const double u = std::exp(-t / tau);
  const double c = omega_plus * std::cos(omega_plus * t) +
                   omega_minus * std::cos(omega_minus * t);
  const double s = std::sin(omega_plus * t) + std::sin(omega_minus * t);
  return -amplitude * u * (c - s / tau);
}

void emf_model_jacobian(double t, double amplitude, double tau, double omega_plus,
                      double omega_minus, double out[4]) {
  if (t < 0.0) {
    out[0] = out[1] = out[2] = out[3] = 0.0;
    return;
  }
  const double u = std::exp(-t / tau);
  const double cp = std::cos(omega_plus * t);
  const double cm = std::cos(omega_minus * t);
  const double sp = std::sin(omega_plus * t);
  const double sm = std::sin(omega_minus * t);
  const double c = omega_plus * cp + omega_minus * cm;
  const double s = sp + sm;
  out[0] = -u * (c - s / tau);
  out[1] = -amplitude * u * ((t / (tau * tau)) * (c - s / tau) + s / (tau * tau));
  out[2] = -amplitude * u * (cp - omega_plus * t * sp - t * cp / tau);
  out[3] = -amplitude * u * (cm - omega_minus * t * sm - t * cm / tau);
}

namespace {

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve_dense(int n, double a[4][4], double b[4], double x[4]) {
  int piv[4] = {0, 1, 2, 3};
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[piv[r]][col]) > std::fabs(a[piv[best]][col])) best = r;
    std::swap(piv[col], piv[best]);
    const double p = a[piv[col]][col];
    if (std::fabs(p) < 1e-300) return false;
    for (int r = col + 1; r < n; ++r) {
      const double f = a[piv[r]][col] / p;
      for (int c2 = col; c2 < n; ++c2) a[piv[r]][c2] -= f * a[piv[col]][c2];
      b[piv[r]] -= f * b[piv[col]];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    double acc = b[piv[col]];
    for (int c2 = col + 1; c2 < n; ++c2) acc -= a[piv[col]][c2] * x[c2];
    x[col] = acc / a[piv[col]][col];
  }
  return true;
}

struct Problem {
  const Waveform* emf;
  std::size_t i0;  // first fitted sample (t >= 0)
  int npar;        // 2 (fixed frequencies) or 4

  double chi2(const double p[4]) const {
    double acc = 0.0;
    for (std::size_t i = i0; i < emf->size(); ++i) {
      const double r =
          emf_model(emf->t(i), p[0], p[1], p[2], p[3]) - emf->samples[i];
      acc += r * r;
    }
    return acc;
  }

  void normal_equations(const double p[4], double h[4][4], double g[4],
                        double* chi2_out) const {
    for (int a = 0; a < 4; ++a) {
      g[a] = 0.0;
      for (int b = 0; b < 4; ++b) h[a][b] = 0.0;
    }
    double acc = 0.0;
    double jrow[4];
    for (std::size_t i = i0; i < emf->size(); ++i) {
      const double t = emf->t(i);
      const double r = emf_model(t, p[0], p[1], p[2], p[3]) - emf->samples[i];
      acc += r * r;
      emf_model_jacobian(t, p[0], p[1], p[2], p[3], jrow);
      for (int a = 0; a < npar; ++a) {
        g[a] += jrow[a] * r;
        for (int b = a; b < npar; ++b) h[a][b] += jrow[a] * jrow[b];
      }
    }
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < a; ++b) h[a][b] = h[b][a];
    *chi2_out = acc;
  }
};

}  // namespace

FitResult fit_emf_model(const Waveform& emf, const FitSeed& init, FitMode mode,
                  const FitOptions& opts) {
  emf.validate();
  if (!(init.tau > 0.0)) throw ValidationError("fit_emf_model: init tau must be positive");
  const double wmax = std::max(init.omega_plus, init.omega_minus);
  if (!(wmax > 0.0)) throw ValidationError("fit_emf_model: need positive seed frequencies");

  Problem prob;
  prob.emf = &emf;
  prob.i0 = emf.index_at(0.0);
  prob.npar = (mode == FitMode::frequencies_free) ? 4 : 2;
  const std::size_t n_fit = emf.size() - prob.i0;
  if (n_fit < 16) throw ValidationError("fit_emf_model: too few samples at t >= 0");
  const double span = emf.t(emf.size() - 1) - emf.t(prob.i0);
  if (span < 2.0 * (2.0 * M_PI / wmax))
    throw ValidationError("fit_emf_model: record covers fewer than 2 oscillation periods");

  double p[4] = {init.amplitude, init.tau, init.omega_plus, init.omega_minus};

  double h[4][4], g[4];
  double chi2;
  prob.normal_equations(p, h, g, &chi2);

  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < opts.max_iter && !converged; ++iter) {
    // cosine of the residual against each Jacobian column
    double gcos = 0.0;
    for (int a = 0; a < prob.npar; ++a)
      if (h[a][a] > 0.0 && chi2 > 0.0)
        gcos = std::max(gcos, std::fabs(g[a]) / std::sqrt(h[a][a] * chi2));
    if (gcos <= opts.gtol || chi2 == 0.0) {
      converged = true;
      break;
    }

    bool stepped = false;
    while (lambda < 1e14) {
      double a_damped[4][4], rhs[4], delta[4];
      for (int a = 0; a < prob.npar; ++a) {
        rhs[a] = -g[a];
        for (int b = 0; b < prob.npar; ++b) a_damped[a][b] = h[a][b];
        a_damped[a][a] *= (1.0 + lambda);
        if (a_damped[a][a] == 0.0) a_damped[a][a] = lambda * 1e-300;
      }
      if (!solve_dense(prob.npar, a_damped, rhs, delta)) {
        lambda *= 10.0;
        continue;
      }
      double trial[4] = {p[0], p[1], p[2], p[3]};
      for (int a = 0; a < prob.npar; ++a) trial[a] += delta[a];
      if (!(trial[1] > 0.0) || (prob.npar == 4 && (trial[2] < 0.0 || trial[3] < 0.0))) {
        lambda *= 10.0;  // step left the physical domain
        continue;
      }
      const double trial_chi2 = prob.chi2(trial);
      if (trial_chi2 <= chi2) {
        double max_rel_step = 0.0;
        for (int a = 0; a < prob.npar; ++a)
          max_rel_step = std::max(
              max_rel_step, std::fabs(delta[a]) / std::max(std::fabs(p[a]), 1e-300));
        const double rel_impr = (chi2 > 0.0) ? (chi2 - trial_chi2) / chi2 : 0.0;
        for (int a = 0; a < prob.npar; ++a) p[a] = trial[a];
        prob.normal_equations(p, h, g, &chi2);
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (max_rel_step <= opts.xtol || rel_impr <= opts.ftol) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) break;  // damping exhausted, no acceptable step
  }

  FitResult res;
  res.amplitude = p[0];
  res.tau = p[1];
  res.omega_plus = p[2];
  res.omega_minus = p[3];
  res.converged = converged;
  res.iterations = iter;
  res.residual_rms = std::sqrt(chi2 / static_cast<double>(n_fit));

  // covariance from the undamped normal equations at the optimum
  if (n_fit > static_cast<std::size_t>(prob.npar)) {
    const double variance = chi2 / static_cast<double>(n_fit - prob.npar);
    double sig[4] = {0.0, 0.0, 0.0, 0.0};
    for (int a = 0; a < prob.npar; ++a) {
      double hc[4][4], rhs[4], col[4];
      for (int i2 = 0; i2 < prob.npar; ++i2) {
        rhs[i2] = (i2 == a) ? 1.0 : 0.0;
        for (int j2 = 0; j2 < prob.npar; ++j2) hc[i2][j2] = h[i2][j2];
      }
      if (!solve_dense(prob.npar, hc, rhs, col))
        throw NumericalError("fit_emf_model: singular normal equations at the optimum");
      sig[a] = std::sqrt(std::max(0.0, variance * col[a]));
    }
    res.sigma_amplitude = sig[0];
    res.sigma_tau = sig[1];
    res.sigma_omega_plus = sig[2];
    res.sigma_omega_minus = sig[3];
  }
  return res;
}

FitSeed initial_guess(const Waveform& emf) {
  emf.validate();
  const std::size_t i0 = emf.index_at(0.0);
  const std::size_t n = emf.size();
  if (n - i0 < 16) throw HeuristicError("initial_guess: too few samples at t >= 0");

  double xmax = 0.0;
  for (std::size_t i = i0; i < n; ++i) xmax = std::max(xmax, std::fabs(emf.samples[i]));
  if (xmax == 0.0) throw HeuristicError("initial_guess: all-zero waveform");

  // noise scale from second differences
  double d2 = 0.0;
  for (std::size_t i = i0 + 2; i < n; ++i) {
    const double d =
        emf.samples[i] - 2.0 * emf.samples[i - 1] + emf.samples[i - 2];
    d2 += d * d;
  }
  const double sigma = std::sqrt(d2 / (6.0 * static_cast<double>(n - i0 - 2)));
  const double h = std::max(3.0 * sigma, 1e-9 * xmax);

  // hysteresis-filtered zero crossings and per-segment extrema
  std::vector<double> crossings;
  std::vector<double> peak_t, peak_v;
  int state = 0;
  double seg_peak = 0.0, seg_peak_time = emf.t(i0);
  for (std::size_t i = i0; i < n; ++i) {
    const double x = emf.samples[i];
    if (std::fabs(x) > seg_peak) {
      seg_peak = std::fabs(x);
      seg_peak_time = emf.t(i);
    }
    int ns = 0;
    if (x > h)
      ns = 1;
    else if (x < -h)
      ns = -1;
    if (ns == 0 || ns == state) continue;
    if (state != 0) {
      // sign transition: locate the interpolated zero crossing
      std::size_t k = i;
      while (k > i0 && !(emf.samples[k - 1] * emf.samples[k] <= 0.0 &&
                         emf.samples[k] * ns >= 0.0))
        --k;
      double tc = emf.t(k);
      if (k > i0) {
        const double x0 = emf.samples[k - 1];
        const double x1 = emf.samples[k];
        if (x1 != x0) tc = emf.t(k - 1) + emf.dt * (-x0) / (x1 - x0);
      }
      crossings.push_back(tc);
      peak_t.push_back(seg_peak_time);
      peak_v.push_back(seg_peak);
      seg_peak = 0.0;
    }
    state = ns;
  }
  if (seg_peak > 0.0) {
    peak_t.push_back(seg_peak_time);
    peak_v.push_back(seg_peak);
  }
  if (crossings.size() < 3)
    throw HeuristicError("initial_guess: fewer than 2 oscillations detected; "
                         "provide explicit seed values");

  std::vector<double> gaps;
  for (std::size_t i = 1; i < crossings.size(); ++i)
    gaps.push_back(crossings[i] - crossings[i - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  const double half_period = gaps[gaps.size() / 2];
  const double omega = M_PI / half_period;

  // log-linear envelope fit over segment peaks
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t np = 0;
  for (std::size_t i = 0; i < peak_v.size(); ++i) {
    if (peak_v[i] <= h) continue;
    const double y = std::log(peak_v[i]);
    st += peak_t[i];
    sy += y;
    stt += peak_t[i] * peak_t[i];
    sty += peak_t[i] * y;
    ++np;
  }
  double tau = (emf.t(n - 1) - emf.t(i0)) * 10.0;  // fallback: no visible decay
  if (np >= 2) {
    const double denom = np * stt - st * st;
    if (denom > 0.0) {
      const double slope = (np * sty - st * sy) / denom;
      if (slope < 0.0) tau = -1.0 / slope;
    }
  }

  const double first_peak = peak_v.front();
  const double first_peak_t = peak_t.front();
  const double amplitude = first_peak * std::exp(first_peak_t / tau) / (2.0 * omega);

  FitSeed seed;
  seed.amplitude = amplitude;
  seed.tau = tau;
  seed.omega_plus = omega;
  seed.omega_minus = omega;
  return seed;
}

std::vector<FitResult> fit_ensemble(const Waveform& clean_emf, double snr_db,
                                    int n_seeds, std::uint64_t seed0,
                                    const FitSeed& fallback, FitMode mode, Run run,
                                    const FitOptions& opts) {
  if (n_seeds < 1) throw ValidationError("fit_ensemble: n_seeds must be >= 1");
  std::vector<FitResult> results(static_cast<std::size_t>(n_seeds));
  for_each_index(results.size(), run, [&](std::size_t k) {
    const Waveform noisy = add_noise(clean_emf, snr_db, seed0 + k);
    FitSeed seed = fallback;
    try {
      const FitSeed guess = initial_guess(noisy);
      seed.amplitude = guess.amplitude;
      seed.tau = guess.tau;
      if (mode == FitMode::frequencies_free) {
        seed.omega_plus = guess.omega_plus;
        seed.omega_minus = guess.omega_minus;
      }
    } catch (const HeuristicError&) {
      // keep the fallback seed
    }
    results[k] = fit_emf_model(noisy, seed, mode, opts);
  });
  return results;
}

}  // namespace srm
