#include "polx/rtbridge.hpp"

#include <cmath>

#include "polx/geometry.hpp"
#include "polx/quadrature.hpp"

namespace polx {

RTBasis rt_basis(const Vec3& K) {
  const double kt = std::hypot(K.x(), K.y());
  if (!(kt > 0.0))
    throw ValidationError("rt basis undefined for purely axial K");
  const double n = K.norm();
  const Vec2 h(K.x() / kt, K.y() / kt);
  RTBasis b;
  b.z0 = K / n;
  b.z1 = Vec3(K.z() * h.x(), K.z() * h.y(), -kt) / n;
  b.z2 = Vec3(-h.y(), h.x(), 0.0);
  return b;
}

Mat2 t_matrix(const Vec3& K, const Vec3& Kp, double k) {
  if (std::abs(K.norm() - k) > 1e-8 * k || std::abs(Kp.norm() - k) > 1e-8 * k)
    throw ValidationError("t_matrix arguments must lie on |K| = k");
  const RTBasis a = rt_basis(K), b = rt_basis(Kp);
  Mat2 t;
  t << a.z1.dot(b.z1), a.z1.dot(b.z2), a.z2.dot(b.z1), a.z2.dot(b.z2);
  return t;
}

Mat2 sigma_matrix(const SpectralMedium& m, const Vec2& kappa,
                  const DiskQuadrature& q) {
  const double n = kappa.norm();
  const double b = beta(kappa);
  if (!(n > 0.0)) throw ValidationError("kappa must be nonzero");
  if (!(q.radius > n && q.radius < 1.0))
    throw ValidationError("disk radius must lie in (|kappa|, 1)");
  const double k = m.k(), g = m.gamma(), a = m.alpha();
  const double kg = k / g;
  const Rule& gw = gauss_legendre_ref(q.n_window);
  const Rule& go = gauss_legendre_ref(q.n_outer);
  const double dphi = kTwoPi / q.n_phi;
  const double rho_w = q.window / kg;
  Mat2 acc = Mat2::Zero();
  auto band = [&](const Rule& ref, double r0, double r1, const Vec2& e) {
    const double c = 0.5 * (r0 + r1), h = 0.5 * (r1 - r0);
    for (size_t i = 0; i < ref.size(); ++i) {
      const double rho = c + h * ref.x[i];
      const Vec2 kp = kappa + rho * e;
      const double np = kp.norm();
      if (!(np > 0.0)) continue;
      const double bp = std::sqrt(1.0 - np * np);
      const double qt2 = kg * kg * rho * rho;
      const double r = m.psd3_tz(qt2, kg * (b - bp));
      if (r == 0.0) continue;
      const Mat2 G = gamma_aa_raw(kappa, n, b, kp, np, bp);
      acc += (h * ref.w[i] * rho * dphi * r) * (G * G.transpose());
    }
  };
  for (int j = 0; j < q.n_phi; ++j) {
    const double phi = (j + 0.5) * dphi;
    const Vec2 e(std::cos(phi), std::sin(phi));
    const double ke = kappa.dot(e);
    const double rmax = -ke + std::sqrt(ke * ke + q.radius * q.radius - n * n);
    const double r1 = std::min(rmax, rho_w);
    band(gw, 0.0, r1, e);
    if (rmax > r1) band(go, r1, rmax, e);
  }
  const double pref =
      k * k * b * a * a / (4.0 * g * g * g) * k * k / (kTwoPi * kTwoPi);
  Mat2 s = pref * acc;
  s(0, 1) = s(1, 0) = 0.5 * (s(0, 1) + s(1, 0));
  return s;
}

double sigma_total(const SpectralMedium& m, const Vec2& kappa,
                   const DiskQuadrature& q, double tol) {
  const Mat2 s = sigma_matrix(m, kappa, q);
  const double c = 0.5 * s.trace();
  const double dev = (s - c * Mat2::Identity()).norm();
  if (dev > tol * std::abs(c))
    throw NumericalError("cross section matrix is not scalar: deviation " +
                         std::to_string(dev / std::abs(c)));
  return c;
}

Mat2 re_q_sphere(const SpectralMedium& m, const Vec2& kappa,
                 const SphereQuadrature& q) {
  if (!m.isotropic())
    throw ValidationError("sphere route needs a fully isotropic medium");
  const Frame f = frame_vectors(kappa);
  const double b = f.kvec.z();
  const double k = m.k(), g = m.gamma(), a = m.alpha();
  const double kg = k / g;
  const double depth = std::min(2.0, std::pow(q.window / kg, 2));
  const double dphi = kTwoPi / q.n_phi;
  Mat2 acc = Mat2::Zero();
  auto band = [&](const Rule& ref, double t0, double t1) {
    const double c = 0.5 * (t0 + t1), h = 0.5 * (t1 - t0);
    for (size_t i = 0; i < ref.size(); ++i) {
      const double t = c + h * ref.x[i];
      const double r = m.psd_iso(kg * std::sqrt(2.0 * (1.0 - t)));
      if (r == 0.0) continue;
      const double st = std::sqrt(std::max(0.0, 1.0 - t * t));
      for (int j = 0; j < q.n_phi; ++j) {
        const double phi = (j + 0.5) * dphi;
        const double k1 = st * std::cos(phi);  // along u_perp
        const double k2 = st * std::sin(phi);  // along u
        Mat2 M;
        M << 1.0 - k2 * k2, -k1 * k2, -k1 * k2, 1.0 - k1 * k1;
        acc += (h * ref.w[i] * dphi * r) * M;
      }
    }
  };
  band(gauss_legendre_ref(q.n_window), 1.0 - depth, 1.0);
  if (depth < 2.0) band(gauss_legendre_ref(q.n_theta), -1.0, 1.0 - depth);
  const double pref =
      -std::pow(k, 4) * a * a / (8.0 * kTwoPi * kTwoPi * g * g * g * b);
  return pref * acc;
}

}  // namespace polx
