#pragma once

#include <cstdint>
#include <vector>

#include "srm/parallel.hpp"
#include "srm/waveform.hpp"

namespace srm {

enum class FitMode { frequencies_fixed, frequencies_free };

struct FitSeed {
  double amplitude = 0.0;  // V s
  double tau = 1e-9;       // s
  double omega_plus = 0.0;
  double omega_minus = 0.0;
};

struct FitResult {
  double amplitude = 0.0;
  double tau = 0.0;
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double sigma_amplitude = 0.0;  // one-sigma from the local quadratic model
  double sigma_tau = 0.0;
  double sigma_omega_plus = 0.0;
  double sigma_omega_minus = 0.0;
  double residual_rms = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct FitOptions {
  int max_iter = 200;
  double ftol = 1e-14;  // relative chi^2 improvement
  double xtol = 1e-13;  // relative parameter step
  double gtol = 1e-10;  // cosine measure of the gradient
};

// EMF of a two-branch damped precession: the time derivative of
// A (sin w+ t + sin w- t) e^(-t/tau), taken analytically, with the sign
// giving the induced voltage. Zero for t < 0.
double emf_model(double t, double amplitude, double tau, double omega_plus,
                     double omega_minus);

// d(model)/d(A, tau, w+, w-) at time t.
void emf_model_jacobian(double t, double amplitude, double tau, double omega_plus,
                      double omega_minus, double out[4]);

// Damped Gauss-Newton (Levenberg-Marquardt) fit of the model to an EMF
// record; only samples with t >= 0 enter the residual. Accepted steps
// never increase the residual. In frequencies_fixed mode the two omegas
// stay at their seed values.
FitResult fit_emf_model(const Waveform& emf, const FitSeed& init, FitMode mode,
                  const FitOptions& opts = {});

// Envelope/zero-crossing heuristics for seeding the fit. Throws
// HeuristicError when fewer than two oscillations are visible.
FitSeed initial_guess(const Waveform& emf);

// Monte-Carlo ensemble: per-seed noise injection, re-seeded guess, fit.
// Results are keyed by seed index, independent of execution order.
std::vector<FitResult> fit_ensemble(const Waveform& clean_emf, double snr_db,
                                    int n_seeds, std::uint64_t seed0,
                                    const FitSeed& fallback, FitMode mode,
                                    Run run = Run::parallel,
                                    const FitOptions& opts = {});

}  // namespace srm
