#include "srm/uncoupled.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "srm/eigen.hpp"
#include "srm/errors.hpp"

namespace srm {

namespace {

struct Dense {
  int n = 0;
  std::vector<double> a;
  explicit Dense(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

Dense matmul(const Dense& x, const Dense& y) {
  Dense z(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      const double xik = x.at(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < x.n; ++j) z.at(i, j) += xik * y.at(k, j);
    }
  return z;
}

double ladder(int l, int m) {  // <l, m+1| L+ |l, m> in units of hbar
  return std::sqrt(static_cast<double>(l) * (l + 1) - static_cast<double>(m) * (m + 1));
}

}  // namespace

std::vector<double> uncoupled_eigenvalues(const RotorFieldConfig& cfg,
                                          const MolecularConstants& mol,
                                          const UniversalConstants& uni) {
  cfg.validate();
  mol.validate();
  const int nq = cfg.n;
  const int dim = 3 * (2 * nq + 1);
  auto idx = [nq](int mn, int ms) { return (mn + nq) * 3 + (ms + 1); };

  // N.S = Nz Sz + (N+ S- + N- S+)/2 in units of hbar^2.
  Dense ns(dim);
  for (int mn = -nq; mn <= nq; ++mn) {
    for (int ms = -1; ms <= 1; ++ms) {
      ns.at(idx(mn, ms), idx(mn, ms)) = static_cast<double>(mn) * ms;
      if (mn + 1 <= nq && ms - 1 >= -1) {
        const double v = 0.5 * ladder(nq, mn) * ladder(1, ms - 1);
        ns.at(idx(mn + 1, ms - 1), idx(mn, ms)) = v;
        ns.at(idx(mn, ms), idx(mn + 1, ms - 1)) = v;
      }
    }
  }

  const Dense ns2 = matmul(ns, ns);

  Dense h(dim);
  const double denom = static_cast<double>(nq) * (nq + 1.0);
  const double zeeman = -mol.g_factor * uni.mu_B * cfg.signed_b();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      h.at(i, j) = mol.gamma * ns.at(i, j) - mol.lambda * ns2.at(i, j) / denom;
  for (int mn = -nq; mn <= nq; ++mn)
    for (int ms = -1; ms <= 1; ++ms)
      h.at(idx(mn, ms), idx(mn, ms)) += zeeman * ms;

  EigenResult er = jacobi_eigensymm(std::move(h.a), dim, 128);
  return er.values;
}

double coupled_vs_uncoupled_deviation(const RotorFieldConfig& cfg,
                                      const MolecularConstants& mol,
                                      const UniversalConstants& uni, Run run) {
  const std::vector<double> brute = uncoupled_eigenvalues(cfg, mol, uni);
  const std::vector<double> coupled =
      diagonalize(cfg, mol, uni, run).all_energies_sorted();
  if (brute.size() != coupled.size())
    throw NumericalError("state count mismatch between coupled and uncoupled spectra");
  double scale = 0.0;
  for (double e : brute) scale = std::max(scale, std::fabs(e));
  if (scale == 0.0) scale = 1.0;
  double dev = 0.0;
  for (std::size_t i = 0; i < brute.size(); ++i)
    dev = std::max(dev, std::fabs(brute[i] - coupled[i]));
  return dev / scale;
}

}  // namespace srm
