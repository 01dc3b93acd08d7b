#include "srm/coil.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "srm/errors.hpp"

namespace srm {

void CoilGeometry::validate() const {
  if (!(semi_axis_a > 0.0) || !(semi_axis_b > 0.0))
    throw ValidationError("CoilGeometry: semi-axes must be positive");
  if (turns < 1) throw ValidationError("CoilGeometry: turns must be >= 1");
  if (!(tilt_alpha >= 0.0) || !(tilt_alpha < M_PI / 2.0))
    throw ValidationError("CoilGeometry: tilt must lie in [0, pi/2)");
  if (shape == CoilShape::circular && semi_axis_a != semi_axis_b)
    throw ValidationError("CoilGeometry: circular coil needs equal semi-axes");
}

Vec3 CoilGeometry::normal() const {
  return {std::cos(tilt_alpha), std::sin(tilt_alpha), 0.0};
}

Vec3 CoilGeometry::boundary_point(double theta) const {
  // in-plane frame: u perpendicular to z, v along z
  const Vec3 u{-std::sin(tilt_alpha), std::cos(tilt_alpha), 0.0};
  const Vec3 v = unit_z();
  return center + u * (semi_axis_a * std::cos(theta)) +
         v * (semi_axis_b * std::sin(theta));
}

Vec3 CoilGeometry::boundary_tangent(double theta) const {
  const Vec3 u{-std::sin(tilt_alpha), std::cos(tilt_alpha), 0.0};
  const Vec3 v = unit_z();
  return u * (-semi_axis_a * std::sin(theta)) + v * (semi_axis_b * std::cos(theta));
}

CoilGeometry CoilGeometry::longitudinal_default() {
  CoilGeometry c;
  c.shape = CoilShape::circular;
  c.semi_axis_a = c.semi_axis_b = 0.6e-3;
  c.tilt_alpha = 0.0;
  c.alignment = CoilAxis::longitudinal;
  return c;
}

CoilGeometry CoilGeometry::transverse_default() {
  CoilGeometry c;
  c.shape = CoilShape::elliptical;
  c.semi_axis_a = 0.465e-3;
  c.semi_axis_b = 1.9e-3;
  c.tilt_alpha = 59.0 * M_PI / 180.0;
  c.alignment = CoilAxis::transverse_tilted;
  return c;
}

void SampleModel::validate() const {
  if (positions.empty() || positions.size() != weights.size())
    throw ValidationError("SampleModel: positions/weights mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ValidationError("SampleModel: negative weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw ValidationError("SampleModel: weights must sum to 1");
  if (!(beam_radius > 0.0) || !(extent > 0.0))
    throw ValidationError("SampleModel: extent and beam_radius must be positive");
}

SampleModel SampleModel::beam_line(double extent, int dipoles, double beam_radius,
                                   Vec3 center) {
  if (dipoles < 1) throw ValidationError("SampleModel: need at least one dipole");
  SampleModel s;
  s.extent = extent;
  s.beam_radius = beam_radius;
  const double w = 1.0 / dipoles;
  for (int i = 0; i < dipoles; ++i) {
    const double frac =
        (dipoles == 1) ? 0.0 : -0.5 + static_cast<double>(i) / (dipoles - 1);
    s.positions.push_back(center + unit_x() * (frac * extent));
    s.weights.push_back(w);
  }
  return s;
}

namespace {

struct LineIntegrand {
  const CoilGeometry* coil;
  Vec3 pos;     // dipole position
  Vec3 moment;  // A m^2
  double mu0_over_4pi;

  double operator()(double theta) const {
    const Vec3 d = coil->boundary_point(theta) - pos;
    const double r2 = d.dot(d);
    const double r = std::sqrt(r2);
    const Vec3 a = moment.cross(d) * (mu0_over_4pi / (r2 * r));
    return a.dot(coil->boundary_tangent(theta));
  }
};

struct PanelResult {
  double integral = 0.0;
  double error = 0.0;
};

template <class F>
PanelResult adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                             double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0)
    throw NumericalError("coil flux quadrature: refinement limit reached before "
                         "the requested tolerance");
  if (std::fabs(delta) <= 15.0 * tol) {
    PanelResult r;
    r.integral = left + right + delta / 15.0;
    r.error = std::fabs(delta) / 15.0;
    return r;
  }
  const PanelResult rl =
      adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
  const PanelResult rr =
      adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  PanelResult r;
  r.integral = rl.integral + rr.integral;
  r.error = rl.error + rr.error;
  return r;
}

constexpr int kBasePanels = 16;
constexpr int kMaxDepth = 28;

void check_not_on_wire(const CoilGeometry& coil, const Vec3& pos) {
  double dmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 1440; ++i) {
    const double theta = 2.0 * M_PI * i / 1440.0;
    dmin = std::min(dmin, (coil.boundary_point(theta) - pos).norm());
  }
  if (dmin < 1e-9)
    throw SingularConfigError(
        "dipole within 1e-9 m of the coil wire; flux integral is singular");
}

}  // namespace

double dipole_loop_flux(const CoilGeometry& coil, const Vec3& dipole_pos,
                        const Vec3& moment, const UniversalConstants& uni,
                        double rel_tol, double* err_estimate) {
  coil.validate();
  check_not_on_wire(coil, dipole_pos);
  const LineIntegrand f{&coil, dipole_pos, moment, uni.mu_0 / (4.0 * M_PI)};

  // Coarse pass fixes the tolerance scale: integrand mass, not the signed
  // integral, so nearly-canceling geometries still resolve.
  double mass = 0.0;
  for (int i = 0; i < kBasePanels * 4; ++i) {
    const double theta = 2.0 * M_PI * (i + 0.5) / (kBasePanels * 4);
    mass += std::fabs(f(theta));
  }
  mass *= 2.0 * M_PI / (kBasePanels * 4);
  if (mass == 0.0) {
    if (err_estimate) *err_estimate = 0.0;
    return 0.0;
  }
  const double tol = rel_tol * mass / kBasePanels;

  double integral = 0.0;
  double error = 0.0;
  for (int i = 0; i < kBasePanels; ++i) {
    const double a = 2.0 * M_PI * i / kBasePanels;
    const double b = 2.0 * M_PI * (i + 1) / kBasePanels;
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const PanelResult r = adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, kMaxDepth);
    integral += r.integral;
    error += r.error;
  }
  if (err_estimate) *err_estimate = error;
  return integral;
}

CouplingResult coupling_coefficient(const CoilGeometry& coil, const SampleModel& sample,
                                    const Vec3& moment_axis, const UniversalConstants& uni,
                                    double rel_tol, Run run) {
  coil.validate();
  sample.validate();
  const double axis_norm = moment_axis.norm();
  if (!(axis_norm > 0.0)) throw ValidationError("coupling_coefficient: zero moment axis");
  const Vec3 m = moment_axis * (1.0 / axis_norm);

  std::vector<double> flux(sample.positions.size(), 0.0);
  std::vector<double> err(sample.positions.size(), 0.0);
  for_each_index(sample.positions.size(), run, [&](std::size_t i) {
    flux[i] = dipole_loop_flux(coil, sample.positions[i], m, uni, rel_tol, &err[i]);
  });
  CouplingResult result;
  for (std::size_t i = 0; i < flux.size(); ++i) {
    result.flux_per_moment += sample.weights[i] * flux[i];
    result.quad_error += sample.weights[i] * err[i];
  }
  const double denom = coil.turns * result.flux_per_moment * sample.volume();
  if (denom == 0.0)
    throw NumericalError("coupling_coefficient: zero net flux, coefficient undefined");
  result.c = 1.0 / denom;
  return result;
}

Waveform emf_from_magnetization(const MagnetizationTrace& trace, const CoilGeometry& coil,
                                const SampleModel& sample, const UniversalConstants& uni,
                                Run run) {
  if (trace.size() < 3)
    throw ValidationError("emf_from_magnetization: need at least 3 samples");
  if (trace.omega_max > 0.0) {
    const double max_dt = 2.0 * M_PI / trace.omega_max / 8.0;
    if (trace.dt > max_dt) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "emf_from_magnetization: grid dt = %.3g s exceeds the 8-samples-"
                    "per-period bound %.3g s",
                    trace.dt, max_dt);
      throw ValidationError(msg);
    }
  }
  const bool longitudinal = coil.alignment == CoilAxis::longitudinal;
  const std::vector<double>& mch = longitudinal ? trace.longitudinal : trace.transverse;
  const Vec3 axis = longitudinal ? unit_x() : unit_y();
  const CouplingResult cc = coupling_coefficient(coil, sample, axis, uni, 1e-8, run);

  Waveform emf;
  emf.t0 = trace.t0;
  emf.dt = trace.dt;
  emf.unit = WaveUnit::volt;
  emf.samples.assign(trace.size(), 0.0);
  const double inv_c = 1.0 / cc.c;
  const std::size_t n = trace.size();
  for_each_index(n, run, [&](std::size_t i) {
    double dm;
    if (i == 0)
      dm = (mch[1] - mch[0]) / trace.dt;
    else if (i == n - 1)
      dm = (mch[n - 1] - mch[n - 2]) / trace.dt;
    else
      dm = (mch[i + 1] - mch[i - 1]) / (2.0 * trace.dt);
    emf.samples[i] = -inv_c * dm;
  });
  emf.meta["channel"] = longitudinal ? "longitudinal" : "transverse";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", cc.c);
  emf.meta["coefficient"] = buf;
  return emf;
}

}  // namespace srm
