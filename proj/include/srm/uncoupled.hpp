#pragma once

#include <vector>

#include "srm/spectrum.hpp"
#include "srm/units.hpp"

namespace srm {

// Brute-force cross-check of the coupled-basis spectrum: the same
// Hamiltonian assembled in the uncoupled product basis |N m_N>|S m_S>
// (dimension 3(2N+1)) from ladder operators, with no recoupling formulas
// involved. Intended for verification; cost grows as (6N+3)^3.
std::vector<double> uncoupled_eigenvalues(const RotorFieldConfig& cfg,
                                          const MolecularConstants& mol,
                                          const UniversalConstants& uni = codata);

// Max |E_coupled - E_uncoupled| over the sorted spectra, divided by the
// largest energy magnitude.
double coupled_vs_uncoupled_deviation(const RotorFieldConfig& cfg,
                                      const MolecularConstants& mol,
                                      const UniversalConstants& uni = codata,
                                      Run run = Run::parallel);

}  // namespace srm
