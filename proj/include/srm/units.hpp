#pragma once

#include <string_view>

namespace srm {

// CODATA 2018 values, SI units. Read-only.
struct UniversalConstants {
  double mu_B = 9.2740100783e-24;  // Bohr magneton, J/T
  double hbar = 1.054571817e-34;   // reduced Planck constant, J s
  double h = 6.62607015e-34;       // Planck constant, J s
  double k_B = 1.380649e-23;       // Boltzmann constant, J/K
  double mu_0 = 1.25663706212e-6;  // vacuum permeability, T m/A
  double c = 2.99792458e8;         // speed of light, m/s
};

inline constexpr UniversalConstants codata{};

// Fine-structure constants of the O2 ground state, stored in joules.
// gamma (spin-rotation) is negative, lambda (spin-spin) positive. The
// electron g-factor carries its physical sign; magnitude claims use |g|.
struct MolecularConstants {
  double gamma;     // J
  double lambda;    // J
  double g_factor;  // dimensionless, signed

  static MolecularConstants oxygen();
  void validate() const;
};

enum class EnergyUnit { joule, inverse_cm, gigahertz, kelvin };

EnergyUnit parse_energy_unit(std::string_view tag);
const char* energy_unit_tag(EnergyUnit u);

double convert_energy(double value, EnergyUnit from, EnergyUnit to,
                      const UniversalConstants& uni = codata);

double ghz_to_joule(double ghz, const UniversalConstants& uni = codata);
double joule_to_ghz(double joule, const UniversalConstants& uni = codata);

}  // namespace srm
