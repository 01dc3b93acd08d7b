#include "srm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "srm/eigen.hpp"
#include "srm/errors.hpp"

namespace srm {

void RotorFieldConfig::validate() const {
  if (n < 1) throw ValidationError("RotorFieldConfig: N must be >= 1");
  if (!(b_tesla >= 0.0) || !std::isfinite(b_tesla))
    throw ValidationError("RotorFieldConfig: B must be finite and >= 0");
}

std::vector<std::string> RotorFieldConfig::warnings() const {
  std::vector<std::string> w;
  if (n % 2 == 0)
    w.push_back("even N = " + std::to_string(n) +
                " is unphysical for O2 (odd rotational levels only)");
  return w;
}

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::minus: return "minus";
    case Branch::zero: return "zero";
    case Branch::plus: return "plus";
  }
  return "?";
}

const char* freq_method_tag(FreqMethod m) {
  return m == FreqMethod::approximate_eq2 ? "approximate-eq2" : "exact-spectrum";
}

double HamiltonianBlock::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim; ++i) t += h[i][i];
  return t;
}

double BlockEigen::energy_of(Branch b) const {
  for (int k = 0; k < dim; ++k)
    if (branch[k] == b) return energy[k];
  throw ValidationError(std::string("branch ") + branch_name(b) +
                        " not present in m=" + std::to_string(m) + " block");
}

bool BlockEigen::has(Branch b) const {
  for (int k = 0; k < dim; ++k)
    if (branch[k] == b) return true;
  return false;
}

const BlockEigen& SpinRotationSpectrum::block(int m) const {
  const int mmax = n + 1;
  if (m < -mmax || m > mmax)
    throw ValidationError("spectrum block m out of range");
  return blocks[static_cast<std::size_t>(m + mmax)];
}

std::size_t SpinRotationSpectrum::state_count() const {
  std::size_t c = 0;
  for (const auto& b : blocks) c += static_cast<std::size_t>(b.dim);
  return c;
}

std::vector<double> SpinRotationSpectrum::all_energies_sorted() const {
  std::vector<double> e;
  e.reserve(state_count());
  for (const auto& b : blocks)
    for (int k = 0; k < b.dim; ++k) e.push_back(b.energy[k]);
  std::sort(e.begin(), e.end());
  return e;
}

double zero_field_energy(int n, Branch b, const MolecularConstants& mol) {
  const double nn = static_cast<double>(n);
  const double denom = nn * (nn + 1.0);
  double ns = 0.0;
  switch (b) {
    case Branch::plus: ns = nn; break;
    case Branch::zero: ns = -1.0; break;
    case Branch::minus: ns = -(nn + 1.0); break;
  }
  return mol.gamma * ns - mol.lambda * ns * ns / denom;
}

namespace {

// N.S eigenvalue on |(N,1) J>: [J(J+1) - N(N+1) - 2]/2.
double ns_value(int n, int j) {
  return 0.5 * (static_cast<double>(j) * (j + 1) -
                static_cast<double>(n) * (n + 1) - 2.0);
}

// <J m|S_z|J m> in the coupled basis, S = 1 (Lande projection).
double sz_diag(int n, int j, int m) {
  const double jj = static_cast<double>(j);
  if (j == 0) return 0.0;
  return m * (jj * (jj + 1.0) + 2.0 - static_cast<double>(n) * (n + 1.0)) /
         (2.0 * jj * (jj + 1.0));
}

// <J-1 m|S_z|J m| magnitude, S = 1 (standard recoupling closed form).
double sz_offdiag(int n, int j, int m) {
  const double jj = static_cast<double>(j);
  const double nn = static_cast<double>(n);
  const double num = (jj * jj - static_cast<double>(m) * m) * (jj + nn + 2.0) *
                     (jj + 1.0 - nn) * (jj - 1.0 + nn) * (nn + 2.0 - jj);
  if (num <= 0.0) return 0.0;
  return std::sqrt(num / ((2.0 * jj - 1.0) * (2.0 * jj + 1.0))) / (2.0 * jj);
}

HamiltonianBlock build_block_at(const RotorFieldConfig& cfg, int m, double b_signed,
                                const MolecularConstants& mol,
                                const UniversalConstants& uni) {
  HamiltonianBlock blk;
  blk.m = m;
  const int jmin = std::max(cfg.n - 1, std::abs(m));
  for (int j = jmin; j <= cfg.n + 1; ++j) {
    blk.j_of_row[static_cast<std::size_t>(blk.dim)] = j;
    ++blk.dim;
  }
  const double denom = static_cast<double>(cfg.n) * (cfg.n + 1.0);
  const double zeeman = -mol.g_factor * uni.mu_B * b_signed;  // coefficient on S_z
  for (int r = 0; r < blk.dim; ++r) {
    const int j = blk.j_of_row[static_cast<std::size_t>(r)];
    const double ns = ns_value(cfg.n, j);
    blk.h[r][r] = mol.gamma * ns - mol.lambda * ns * ns / denom +
                  zeeman * sz_diag(cfg.n, j, m);
    if (r + 1 < blk.dim) {
      const double off = zeeman * sz_offdiag(cfg.n, j + 1, m);
      blk.h[r][r + 1] = off;
      blk.h[r + 1][r] = off;
    }
  }
  return blk;
}

struct TrackedBlock {
  BlockEigen out;
  std::array<std::array<double, 3>, 3> vectors{};  // columns = states
};

TrackedBlock solve_block(const HamiltonianBlock& blk) {
  std::vector<double> a(static_cast<std::size_t>(blk.dim) * blk.dim);
  for (int i = 0; i < blk.dim; ++i)
    for (int j = 0; j < blk.dim; ++j)
      a[static_cast<std::size_t>(i) * blk.dim + j] = blk.h[i][j];
  EigenResult er;
  try {
    er = jacobi_eigensymm(std::move(a), blk.dim);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " in m=" + std::to_string(blk.m) +
                         " block");
  }
  TrackedBlock t;
  t.out.m = blk.m;
  t.out.dim = blk.dim;
  t.out.j_of_row = blk.j_of_row;
  t.out.matrix_trace = blk.trace();
  for (int k = 0; k < blk.dim; ++k) {
    t.out.energy[static_cast<std::size_t>(k)] = er.values[static_cast<std::size_t>(k)];
    for (int r = 0; r < blk.dim; ++r) {
      const double amp = er.vectors[static_cast<std::size_t>(r) * blk.dim + k];
      t.vectors[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = amp;
      t.out.weight[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] = amp * amp;
    }
  }
  return t;
}

Branch branch_of_j(int n, int j) {
  if (j == n + 1) return Branch::plus;
  if (j == n) return Branch::zero;
  return Branch::minus;
}

// Diagonalize one m block at the target field, assigning branch labels by
// eigenvector continuity along a B ramp from 0 (labels are unambiguous at
// B = 0 where the block is diagonal in J). Ordering by eigenvalue alone
// would swap labels at avoided crossings.
BlockEigen track_block(const RotorFieldConfig& cfg, int m,
                       const MolecularConstants& mol, const UniversalConstants& uni) {
  const double b_target = cfg.signed_b();
  const int steps =
      (cfg.b_tesla == 0.0) ? 0
                           : std::max(2, static_cast<int>(std::ceil(cfg.b_tesla / 0.02)));

  TrackedBlock cur = solve_block(build_block_at(cfg, m, 0.0, mol, uni));
  // At B = 0 eigenvalues may appear in any order; label each state by its
  // dominant J component (the eigenvectors are basis vectors here).
  for (int k = 0; k < cur.out.dim; ++k) {
    int rbest = 0;
    for (int r = 1; r < cur.out.dim; ++r)
      if (cur.out.weight[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] >
          cur.out.weight[static_cast<std::size_t>(k)][static_cast<std::size_t>(rbest)])
        rbest = r;
    cur.out.branch[static_cast<std::size_t>(k)] =
        branch_of_j(cfg.n, cur.out.j_of_row[static_cast<std::size_t>(rbest)]);
  }

  for (int s = 1; s <= steps; ++s) {
    const double b = b_target * static_cast<double>(s) / steps;
    TrackedBlock next = solve_block(build_block_at(cfg, m, b, mol, uni));
    // Greedy max-overlap assignment of previous labels to new states.
    bool used_prev[3] = {false, false, false};
    bool set_new[3] = {false, false, false};
    for (int pass = 0; pass < next.out.dim; ++pass) {
      double best = -1.0;
      int bk = -1, bj = -1;
      for (int k = 0; k < next.out.dim; ++k) {
        if (set_new[k]) continue;
        for (int j = 0; j < cur.out.dim; ++j) {
          if (used_prev[j]) continue;
          double dot = 0.0;
          for (int r = 0; r < next.out.dim; ++r)
            dot += cur.vectors[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] *
                   next.vectors[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)];
          if (std::fabs(dot) > best) {
            best = std::fabs(dot);
            bk = k;
            bj = j;
          }
        }
      }
      next.out.branch[static_cast<std::size_t>(bk)] =
          cur.out.branch[static_cast<std::size_t>(bj)];
      set_new[bk] = true;
      used_prev[bj] = true;
    }
    cur = next;
  }
  return cur.out;
}

}  // namespace

HamiltonianBlock build_hamiltonian_block(const RotorFieldConfig& cfg, int m,
                                         const MolecularConstants& mol,
                                         const UniversalConstants& uni) {
  cfg.validate();
  mol.validate();
  if (std::abs(m) > cfg.n + 1)
    throw ValidationError("build_hamiltonian_block: empty block, |m| = " +
                          std::to_string(std::abs(m)) + " exceeds N+1 = " +
                          std::to_string(cfg.n + 1));
  return build_block_at(cfg, m, cfg.signed_b(), mol, uni);
}

SpinRotationSpectrum diagonalize(const RotorFieldConfig& cfg,
                                 const MolecularConstants& mol,
                                 const UniversalConstants& uni, Run run) {
  cfg.validate();
  mol.validate();
  SpinRotationSpectrum spec;
  spec.n = cfg.n;
  spec.b_tesla = cfg.b_tesla;
  const int mmax = cfg.n + 1;
  spec.blocks.resize(static_cast<std::size_t>(2 * mmax + 1));
  for_each_index(spec.blocks.size(), run, [&](std::size_t i) {
    const int m = static_cast<int>(i) - mmax;
    spec.blocks[i] = track_block(cfg, m, mol, uni);
  });
  return spec;
}

PrecessionFrequencies frequencies_approximate(const RotorFieldConfig& cfg,
                                              const MolecularConstants& mol,
                                              const UniversalConstants& uni) {
  cfg.validate();
  mol.validate();
  PrecessionFrequencies f;
  f.method = FreqMethod::approximate_eq2;
  const double w =
      uni.mu_B * std::fabs(mol.g_factor) * cfg.b_tesla / (uni.hbar * cfg.n);
  f.omega_plus = w;
  f.omega_minus = w;
  return f;
}

namespace {

// Magnitude of the adjacent-m splitting of one branch, plus its spread
// across all available m pairs.
void branch_frequency(const SpinRotationSpectrum& spec, Branch b,
                      const UniversalConstants& uni, double* omega, double* spread) {
  double w01 = 0.0;
  double wmin = 0.0, wmax = 0.0, wsum = 0.0;
  int count = 0;
  for (int m = 0; m <= spec.n; ++m) {
    const BlockEigen& lo = spec.block(m);
    const BlockEigen& hi = spec.block(m + 1);
    if (!lo.has(b) || !hi.has(b)) break;
    const double w = std::fabs(hi.energy_of(b) - lo.energy_of(b)) / uni.hbar;
    if (m == 0) w01 = w;
    if (count == 0) {
      wmin = wmax = w;
    } else {
      wmin = std::min(wmin, w);
      wmax = std::max(wmax, w);
    }
    wsum += w;
    ++count;
  }
  if (count == 0)
    throw ValidationError(std::string("frequencies_exact: branch ") + branch_name(b) +
                          " has no adjacent-m pair (N too small)");
  *omega = w01;
  const double mean = wsum / count;
  *spread = (mean > 0.0) ? (wmax - wmin) / mean : 0.0;
}

}  // namespace

PrecessionFrequencies frequencies_exact(const RotorFieldConfig& cfg,
                                        const MolecularConstants& mol,
                                        const UniversalConstants& uni, Run run) {
  const SpinRotationSpectrum spec = diagonalize(cfg, mol, uni, run);
  PrecessionFrequencies f;
  f.method = FreqMethod::exact_spectrum;
  branch_frequency(spec, Branch::plus, uni, &f.omega_plus, &f.m_spread_plus);
  branch_frequency(spec, Branch::minus, uni, &f.omega_minus, &f.m_spread_minus);
  return f;
}

void write_spectrum_csv(const std::string& path, const SpinRotationSpectrum& s,
                        const UniversalConstants& uni) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << "m,branch,energy_joule,energy_ghz\n";
  char line[160];
  for (const auto& blk : s.blocks) {
    for (int k = 0; k < blk.dim; ++k) {
      std::snprintf(line, sizeof line, "%d,%s,%.17g,%.17g\n", blk.m,
                    branch_name(blk.branch[static_cast<std::size_t>(k)]),
                    blk.energy[static_cast<std::size_t>(k)],
                    joule_to_ghz(blk.energy[static_cast<std::size_t>(k)], uni));
      out << line;
    }
  }
  if (!out) throw Error("write failure on " + path);
}

}  // namespace srm
