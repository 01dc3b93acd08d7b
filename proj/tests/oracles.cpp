#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracles {

std::vector<double> maxpivot_eigenvalues(std::vector<double> a, int n) {
  auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  for (int iter = 0; iter < 100 * n * n; ++iter) {
    int p = 0, q = 1;
    double biggest = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::fabs(at(i, j)) > biggest) {
          biggest = std::fabs(at(i, j));
          p = i;
          q = j;
        }
    double diag = 0.0;
    for (int i = 0; i < n; ++i) diag = std::fmax(diag, std::fabs(at(i, i)));
    if (biggest <= 1e-16 * (diag > 0.0 ? diag : 1.0)) break;
    const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
    const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                     (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    for (int k = 0; k < n; ++k) {
      const double akp = at(k, p), akq = at(k, q);
      at(k, p) = c * akp - s * akq;
      at(k, q) = s * akp + c * akq;
    }
    for (int k = 0; k < n; ++k) {
      const double apk = at(p, k), aqk = at(q, k);
      at(p, k) = c * apk - s * aqk;
      at(q, k) = s * apk + c * aqk;
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double loop_center_axial_flux(double mu0, double moment, double radius) {
  return mu0 * moment / (2.0 * radius);
}

double two_rate_peak_fraction(double ratio) {
  if (!(ratio > 1.0)) throw std::invalid_argument("ratio must exceed 1");
  const double e = 1.0 / (ratio - 1.0);
  return (std::pow(ratio, -e) - std::pow(ratio, -ratio * e)) / 3.0;
}

double two_rate_peak_time(double tau_minus, double ratio) {
  return std::log(ratio) * ratio * tau_minus / (ratio - 1.0);
}

double lande_omega(double mu_b, double g_abs, double b_tesla, double hbar,
                   int n_quantum, bool plus_branch) {
  const double denom = plus_branch ? (n_quantum + 1.0) : n_quantum;
  return mu_b * g_abs * b_tesla / (hbar * denom);
}

double dft_magnitude(const std::vector<double>& x, std::size_t k) {
  double re = 0.0, im = 0.0;
  const double w = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    re += x[i] * std::cos(w * static_cast<double>(i));
    im -= x[i] * std::sin(w * static_cast<double>(i));
  }
  return std::sqrt(re * re + im * im);
}

}  // namespace oracles
