#include "polx/source.hpp"

#include <cmath>

#include "polx/geometry.hpp"
#include "polx/quadrature.hpp"

namespace polx {

SourceSpec SourceSpec::gaussian_current(double gamma_j, cplx jx, cplx jy,
                                        cplx jz, double k) {
  SourceSpec s;
  s.kind = SourceKind::CurrentDensity;
  s.gamma_j = gamma_j;
  s.k = k;
  s.j_hat = [jx, jy](const Vec2& q) {
    const double g = std::exp(-0.5 * q.squaredNorm());
    return Vec2c(jx * g, jy * g);
  };
  s.jz_hat = [jz](const Vec2& q) {
    return jz * std::exp(-0.5 * q.squaredNorm());
  };
  return s;
}

InitialAmplitudes initial_amplitudes(const SourceSpec& spec,
                                     const Vec2& kappa) {
  const double b = beta(kappa);
  InitialAmplitudes out{};
  switch (spec.kind) {
    case SourceKind::GaussianTMPower: {
      const double s = spec.k * kappa.norm() / spec.gamma_j;
      out.a = std::exp(-0.25 * s * s);
      out.b = out.a;
      return out;
    }
    case SourceKind::AnisotropicGaussianTMPower: {
      // Rotated coordinates, scaled by sqrt(2) so that at 45 degrees they
      // are kappa1 -/+ kappa2.
      const double c = std::cos(spec.rotation), s = std::sin(spec.rotation);
      const double x = std::sqrt(2.0) * (c * kappa.x() - s * kappa.y());
      const double y = std::sqrt(2.0) * (s * kappa.x() + c * kappa.y());
      const double e = 0.5 * (x * x / (spec.width_minor * spec.width_minor) +
                              y * y / (spec.width_major * spec.width_major));
      out.a = std::exp(-0.5 * e);
      out.b = out.a;
      return out;
    }
    case SourceKind::CurrentDensity: {
      if (!spec.j_hat || !spec.jz_hat)
        throw ValidationError("current density spectra not set");
      const double n = kappa.norm();
      if (!(n > 0.0)) throw ValidationError("kappa must be nonzero");
      const Vec2 h = kappa / n;
      const Vec2 hp = perp(h);
      const Vec2 q = spec.k * kappa / spec.gamma_j;
      const Vec2c j = spec.j_hat(q);
      const cplx jz = spec.jz_hat(q);
      const double f = 0.5 / (spec.gamma_j * spec.gamma_j);
      const double sb = std::sqrt(b);
      const cplx hj = h.x() * j.x() + h.y() * j.y();
      const cplx hpj = hp.x() * j.x() + hp.y() * j.y();
      out.a = f * (n * jz / sb - sb * hj);
      out.a_perp = -f * hpj / sb;
      out.b = f * (n * jz / sb + sb * hj);
      out.b_perp = out.a_perp;
      return out;
    }
  }
  return out;
}

Mat2c initial_coherence(const SourceSpec& spec, const Vec2& kappa) {
  const InitialAmplitudes a = initial_amplitudes(spec, kappa);
  const Vec2c v(a.a, a.a_perp);
  return v * v.adjoint();
}

double support_radius(const SourceSpec& spec) {
  switch (spec.kind) {
    case SourceKind::GaussianTMPower:
      return 7.0 * spec.gamma_j / spec.k;
    case SourceKind::AnisotropicGaussianTMPower:
      return 7.0 * std::max(spec.width_minor, spec.width_major) /
             std::sqrt(2.0);
    case SourceKind::CurrentDensity:
      // The built-in Gaussian current decays like exp(-q^2/2) in q.
      return 7.0 * spec.gamma_j / spec.k;
  }
  return 1.0;
}

FieldSample plane_wave_fields(const Vec2& kappa, cplx a, cplx a_perp) {
  const Frame f = frame_vectors(kappa);
  const double s = 1.0 / std::sqrt(f.kvec.z());
  FieldSample out;
  out.e = s * (a * f.u.cast<cplx>() + a_perp * f.u_perp.cast<cplx>());
  out.h = s * (a * f.u_perp.cast<cplx>() - a_perp * f.u.cast<cplx>());
  return out;
}

namespace {

FieldSample synthesize(const SourceSpec& spec, const Vec3& x, int nr, int nt,
                       double rmax) {
  const Rule rr = gauss_legendre(nr, 0.0, rmax);
  const double dt = kTwoPi / nt;
  const double k = spec.k;
  FieldSample acc;
  acc.e.setZero();
  acc.h.setZero();
  for (int i = 0; i < nr; ++i) {
    const double r = rr.x[i];
    for (int j = 0; j < nt; ++j) {
      const double t = (j + 0.5) * dt;
      const Vec2 kap(r * std::cos(t), r * std::sin(t));
      const InitialAmplitudes a = initial_amplitudes(spec, kap);
      const FieldSample p = plane_wave_fields(kap, a.a, a.a_perp);
      const double bz = std::sqrt(1.0 - r * r);
      const double ph = k * (kap.x() * x.x() + kap.y() * x.y() + bz * x.z());
      const cplx w = (rr.w[i] * r * dt * k * k / (kTwoPi * kTwoPi)) *
                     cplx(std::cos(ph), std::sin(ph));
      acc.e += w * p.e;
      acc.h += w * p.h;
    }
  }
  return acc;
}

double field_radius(const SourceSpec& spec, const FieldQuadrature& q) {
  return std::min(q.kappa_max, support_radius(spec));
}

}  // namespace

FieldSample homogeneous_field(const SourceSpec& spec, const Vec3& x,
                              const FieldQuadrature& q) {
  if (!(x.z() > 0.0))
    throw ValidationError("field synthesis requires z > 0");
  const double rmax = field_radius(spec, q);
  FieldSample f = synthesize(spec, x, q.n_radial, q.n_angular, rmax);
  if (q.check) {
    const FieldSample g =
        synthesize(spec, x, 2 * q.n_radial, 2 * q.n_angular, rmax);
    const double scale = std::max(g.e.norm() + g.h.norm(), 1e-300);
    const double diff = (f.e - g.e).norm() + (f.h - g.h).norm();
    if (diff > q.tolerance * scale)
      throw NumericalError("field quadrature self-consistency failed");
    f = g;
  }
  return f;
}

double source_energy(const SourceSpec& spec, const FieldQuadrature& q) {
  const double rmax = field_radius(spec, q);
  const Rule rr = gauss_legendre(2 * q.n_radial, 0.0, rmax);
  const int nt = 2 * q.n_angular;
  const double dt = kTwoPi / nt;
  double s = 0.0;
  for (size_t i = 0; i < rr.size(); ++i)
    for (int j = 0; j < nt; ++j) {
      const double t = (j + 0.5) * dt;
      const Vec2 kap(rr.x[i] * std::cos(t), rr.x[i] * std::sin(t));
      const InitialAmplitudes a = initial_amplitudes(spec, kap);
      s += rr.w[i] * rr.x[i] * dt * (std::norm(a.a) + std::norm(a.a_perp));
    }
  return s * spec.k * spec.k / (kTwoPi * kTwoPi);
}

}  // namespace polx
