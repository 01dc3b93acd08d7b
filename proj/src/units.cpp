#include "srm/units.hpp"

#include <cmath>
#include <string>

#include "srm/errors.hpp"

namespace srm {

namespace {

// Conversion factor to joules for one unit of u.
double to_joule_factor(EnergyUnit u, const UniversalConstants& uni) {
  switch (u) {
    case EnergyUnit::joule:
      return 1.0;
    case EnergyUnit::inverse_cm:
      return uni.h * uni.c * 100.0;
    case EnergyUnit::gigahertz:
      return uni.h * 1e9;
    case EnergyUnit::kelvin:
      return uni.k_B;
  }
  throw ValidationError("convert_energy: unknown unit tag");
}

}  // namespace

MolecularConstants MolecularConstants::oxygen() {
  // Standard O2 X^3Sigma_g^- spectroscopy values: lambda = 59.501 GHz,
  // gamma = -0.2526 GHz; g signed so the Zeeman term -g mu_B S.B raises
  // the energy of spin-along-field states.
  MolecularConstants m;
  m.lambda = ghz_to_joule(59.501);
  m.gamma = ghz_to_joule(-0.2526);
  m.g_factor = -2.0023;
  return m;
}

void MolecularConstants::validate() const {
  if (!std::isfinite(gamma) || !std::isfinite(lambda) || !std::isfinite(g_factor))
    throw ValidationError("MolecularConstants: all fields must be finite");
  if (lambda <= 0.0)
    throw ValidationError("MolecularConstants: lambda must be positive");
  if (g_factor == 0.0)
    throw ValidationError("MolecularConstants: g_factor must be nonzero");
}

EnergyUnit parse_energy_unit(std::string_view tag) {
  if (tag == "joule" || tag == "J") return EnergyUnit::joule;
  if (tag == "inverse-centimeter" || tag == "cm^-1" || tag == "1/cm")
    return EnergyUnit::inverse_cm;
  if (tag == "gigahertz" || tag == "GHz") return EnergyUnit::gigahertz;
  if (tag == "kelvin" || tag == "K") return EnergyUnit::kelvin;
  throw ValidationError("unknown energy unit tag: " + std::string(tag));
}

const char* energy_unit_tag(EnergyUnit u) {
  switch (u) {
    case EnergyUnit::joule: return "joule";
    case EnergyUnit::inverse_cm: return "inverse-centimeter";
    case EnergyUnit::gigahertz: return "gigahertz";
    case EnergyUnit::kelvin: return "kelvin";
  }
  return "?";
}

double convert_energy(double value, EnergyUnit from, EnergyUnit to,
                      const UniversalConstants& uni) {
  if (from == to) return value;
  return value * to_joule_factor(from, uni) / to_joule_factor(to, uni);
}

double ghz_to_joule(double ghz, const UniversalConstants& uni) {
  return ghz * uni.h * 1e9;
}

double joule_to_ghz(double joule, const UniversalConstants& uni) {
  return joule / (uni.h * 1e9);
}

}  // namespace srm
