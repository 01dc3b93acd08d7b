#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "srm/parallel.hpp"
#include "srm/units.hpp"

namespace srm {

// Rotational quantum number and applied field. O2 populates odd N only;
// even N is accepted but flagged by warnings(). Field magnitude is B >= 0
// along +z; `inverted` flips the sign.
struct RotorFieldConfig {
  int n = 33;
  double b_tesla = 0.0;
  bool inverted = false;
  static constexpr int spin = 1;

  double signed_b() const { return inverted ? -b_tesla : b_tesla; }
  void validate() const;
  std::vector<std::string> warnings() const;
};

// Branch labels follow the spin projection on N: S_N = +1 correlates to
// J = N+1 at zero field, S_N = 0 to J = N, S_N = -1 to J = N-1.
enum class Branch { minus = 0, zero = 1, plus = 2 };
const char* branch_name(Branch b);

// One m-projection block over the coupled basis |(N,S=1) J, m>,
// J in {N-1, N, N+1} with J >= |m|. Rows ordered by ascending J.
struct HamiltonianBlock {
  int m = 0;
  int dim = 0;
  std::array<int, 3> j_of_row{};
  std::array<std::array<double, 3>, 3> h{};  // joule, symmetric

  double trace() const;
};

struct BlockEigen {
  int m = 0;
  int dim = 0;
  std::array<double, 3> energy{};               // joule, ascending
  std::array<Branch, 3> branch{};               // adiabatic label per state
  std::array<std::array<double, 3>, 3> weight{};  // weight[k][r]: |<J_row r|state k>|^2
  std::array<int, 3> j_of_row{};
  double matrix_trace = 0.0;

  double energy_of(Branch b) const;  // throws if the branch is not in this block
  bool has(Branch b) const;
};

struct SpinRotationSpectrum {
  int n = 0;
  double b_tesla = 0.0;
  std::vector<BlockEigen> blocks;  // m = -(N+1) .. N+1 in order

  const BlockEigen& block(int m) const;
  std::size_t state_count() const;
  std::vector<double> all_energies_sorted() const;
};

enum class FreqMethod { approximate_eq2, exact_spectrum };
const char* freq_method_tag(FreqMethod m);

// Branch precession frequencies, reported as magnitudes. The opposite
// rotation senses of the two branches are handled by the dynamics layer.
struct PrecessionFrequencies {
  double omega_plus = 0.0;   // rad/s, S_N = +1 branch
  double omega_minus = 0.0;  // rad/s, S_N = -1 branch
  FreqMethod method = FreqMethod::approximate_eq2;
  // Relative spread of the adjacent-m energy splitting across m, a
  // diagnostic for how m-dependent the extracted frequency is.
  double m_spread_plus = 0.0;
  double m_spread_minus = 0.0;
};

HamiltonianBlock build_hamiltonian_block(const RotorFieldConfig& cfg, int m,
                                         const MolecularConstants& mol,
                                         const UniversalConstants& uni = codata);

SpinRotationSpectrum diagonalize(const RotorFieldConfig& cfg,
                                 const MolecularConstants& mol,
                                 const UniversalConstants& uni = codata,
                                 Run run = Run::parallel);

PrecessionFrequencies frequencies_approximate(const RotorFieldConfig& cfg,
                                              const MolecularConstants& mol,
                                              const UniversalConstants& uni = codata);

PrecessionFrequencies frequencies_exact(const RotorFieldConfig& cfg,
                                        const MolecularConstants& mol,
                                        const UniversalConstants& uni = codata,
                                        Run run = Run::parallel);

// Diagonal energies at B = 0: N.S takes the values N, -1, -(N+1) on the
// three branches.
double zero_field_energy(int n, Branch b, const MolecularConstants& mol);

void write_spectrum_csv(const std::string& path, const SpinRotationSpectrum& s,
                        const UniversalConstants& uni = codata);

}  // namespace srm
