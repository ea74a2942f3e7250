#pragma once

#include <functional>

#include "polx/types.hpp"

namespace polx {

enum class SourceKind { GaussianTMPower, AnisotropicGaussianTMPower, CurrentDensity };

using Vec2c = Eigen::Vector2cd;
using Vec3c = Eigen::Vector3cd;

struct SourceSpec {
  SourceKind kind = SourceKind::GaussianTMPower;
  double gamma_j = kTwoPi / 50.0;
  double k = kTwoPi;
  // Anisotropic power: exp(-x^2/(2 w_minor^2) - y^2/(2 w_major^2)) with
  // (x, y) = R(-rotation) kappa scaled so that the default matches
  // x = kappa1 - kappa2, y = kappa1 + kappa2.
  double width_minor = 0.03;
  double width_major = 0.1;
  double rotation = kPi / 4.0;
  // Current density spectra evaluated at q = k kappa / gamma_j.
  std::function<Vec2c(const Vec2&)> j_hat;
  std::function<cplx(const Vec2&)> jz_hat;

  /// Gaussian current profile exp(-|q|^2/2) (jx, jy, jz).
  static SourceSpec gaussian_current(double gamma_j, cplx jx, cplx jy, cplx jz,
                                     double k = kTwoPi);
};

struct InitialAmplitudes {
  cplx a, a_perp, b, b_perp;
};

InitialAmplitudes initial_amplitudes(const SourceSpec& spec, const Vec2& kappa);
/// A A^dagger with A = (a, a_perp).
Mat2c initial_coherence(const SourceSpec& spec, const Vec2& kappa);
/// Radius beyond which the amplitudes are negligible (below 1e-8 in power).
double support_radius(const SourceSpec& spec);

struct FieldQuadrature {
  int n_radial = 48;
  int n_angular = 64;
  double kappa_max = 0.95;
  bool check = true;       // compare against a doubled resolution
  double tolerance = 1e-4;
};

struct FieldSample {
  Vec3c e;
  Vec3c h;
  /// Rotated transverse magnetic field (h2, -h1); E_t . conj(U_t) is the
  /// power flux density.
  Vec2c u_t() const { return {h.y(), -h.x()}; }
};

/// Plane-wave synthesis of the field radiated in a homogeneous medium, z > 0.
/// Impedance is 1 in scaled units.
FieldSample homogeneous_field(const SourceSpec& spec, const Vec3& x,
                              const FieldQuadrature& q = {});

/// Per-wave-vector integrands (without the phase factor).
FieldSample plane_wave_fields(const Vec2& kappa, cplx a, cplx a_perp);

/// int d(k kappa)/(2 pi)^2 (|a|^2 + |a_perp|^2) over |kappa| <= kappa_max.
double source_energy(const SourceSpec& spec, const FieldQuadrature& q = {});

}  // namespace polx
