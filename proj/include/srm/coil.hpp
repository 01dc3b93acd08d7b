#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "srm/dynamics.hpp"
#include "srm/parallel.hpp"
#include "srm/units.hpp"
#include "srm/waveform.hpp"

namespace srm {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 unit_x() { return {1.0, 0.0, 0.0}; }
inline Vec3 unit_y() { return {0.0, 1.0, 0.0}; }
inline Vec3 unit_z() { return {0.0, 0.0, 1.0}; }

enum class CoilShape { circular, elliptical };
enum class CoilAxis { longitudinal, transverse_tilted };

// Filamentary loop on the cross-section boundary. The normal lies in the
// x-y plane, tilted by tilt_alpha away from the beam axis x; the first
// semi-axis spans the in-plane direction perpendicular to z, the second
// runs along z.
struct CoilGeometry {
  CoilShape shape = CoilShape::circular;
  double semi_axis_a = 0.6e-3;  // m
  double semi_axis_b = 0.6e-3;  // m
  double tilt_alpha = 0.0;      // rad, angle between coil normal and x
  int turns = 1;
  Vec3 center{};
  CoilAxis alignment = CoilAxis::longitudinal;

  void validate() const;
  Vec3 normal() const;
  Vec3 boundary_point(double theta) const;
  Vec3 boundary_tangent(double theta) const;  // dr/dtheta

  // Circular, 1.2 mm diameter, axis along the beam.
  static CoilGeometry longitudinal_default();
  // Elliptical 0.93 x 3.8 mm^2 cross-section tilted by 59 degrees.
  static CoilGeometry transverse_default();
};

// Magnetized column: a line of weighted point dipoles along the beam axis
// through the coil center. beam_radius sets the effective volume used to
// normalize total moment to magnetization.
struct SampleModel {
  std::vector<Vec3> positions;
  std::vector<double> weights;  // sum to 1
  double extent = 4e-3;         // m
  double beam_radius = 1e-4;    // m

  void validate() const;
  double volume() const { return M_PI * beam_radius * beam_radius * extent; }
  static SampleModel beam_line(double extent = 4e-3, int dipoles = 11,
                               double beam_radius = 1e-4, Vec3 center = {});
};

struct CouplingResult {
  double c = 0.0;                // (A/m) per (V s)
  double flux_per_moment = 0.0;  // Wb per A m^2, weighted over the sample
  double quad_error = 0.0;       // absolute estimate on flux_per_moment
};

// Flux through a single turn from a point dipole, via adaptive quadrature
// of the dipole vector potential along the boundary (Stokes form of the
// surface integral of the dipole field; finite for sources inside the
// loop, singular only on the wire itself).
double dipole_loop_flux(const CoilGeometry& coil, const Vec3& dipole_pos,
                        const Vec3& moment, const UniversalConstants& uni = codata,
                        double rel_tol = 1e-8, double* err_estimate = nullptr);

CouplingResult coupling_coefficient(const CoilGeometry& coil, const SampleModel& sample,
                                    const Vec3& moment_axis,
                                    const UniversalConstants& uni = codata,
                                    double rel_tol = 1e-8, Run run = Run::parallel);

// E(t) = -(1/c) dM/dt by central differences; the channel follows the coil
// alignment (longitudinal coil reads M_par, tilted coil reads M_perp).
Waveform emf_from_magnetization(const MagnetizationTrace& trace, const CoilGeometry& coil,
                                const SampleModel& sample,
                                const UniversalConstants& uni = codata,
                                Run run = Run::parallel);

}  // namespace srm
