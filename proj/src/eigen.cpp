#include "srm/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "srm/errors.hpp"

namespace srm {

EigenResult jacobi_eigensymm(std::vector<double> a, int n, int max_sweeps) {
  if (n <= 0 || static_cast<int>(a.size()) != n * n)
    throw ValidationError("jacobi_eigensymm: bad matrix dimension");

  std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto at = [&](std::vector<double>& m, int i, int j) -> double& {
    return m[static_cast<std::size_t>(i) * n + j];
  };

  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);
  const double stop = 1e-15 * (frob > 0.0 ? frob : 1.0);

  bool converged = (n == 1);
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
    if (std::sqrt(2.0 * off) <= stop) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(a, p, q);
        if (apq == 0.0) continue;
        const double app = at(a, p, p);
        const double aqq = at(a, q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        // smaller-angle root of t^2 + 2 t theta - 1 = 0
        const double t = (theta >= 0.0)
                             ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                             : -1.0 / (-theta + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = at(a, k, p);
          const double akq = at(a, k, q);
          at(a, k, p) = c * akp - s * akq;
          at(a, k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = at(a, p, k);
          const double aqk = at(a, q, k);
          at(a, p, k) = c * apk - s * aqk;
          at(a, q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = at(v, k, p);
          const double vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += at(a, p, q) * at(a, p, q);
    if (std::sqrt(2.0 * off) > stop)
      throw NumericalError("jacobi_eigensymm: no convergence after " +
                           std::to_string(max_sweeps) + " sweeps (n=" +
                           std::to_string(n) + ")");
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return at(a, i, i) < at(a, j, j);
  });

  EigenResult r;
  r.n = n;
  r.values.resize(static_cast<std::size_t>(n));
  r.vectors.resize(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    r.values[static_cast<std::size_t>(k)] = at(a, order[static_cast<std::size_t>(k)],
                                               order[static_cast<std::size_t>(k)]);
    for (int i = 0; i < n; ++i)
      r.vectors[static_cast<std::size_t>(i) * n + k] =
          at(v, i, order[static_cast<std::size_t>(k)]);
  }
  return r;
}

}  // namespace srm
