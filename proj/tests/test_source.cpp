#include <doctest.h>

#include <random>

#include "polx/geometry.hpp"
#include "polx/source.hpp"

using namespace polx;

TEST_CASE("gaussian TM power amplitudes") {
  SourceSpec s;
  s.gamma_j = kTwoPi / 50;
  const InitialAmplitudes a = initial_amplitudes(s, Vec2(s.gamma_j / s.k, 0));
  CHECK(std::norm(a.a) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(a.a_perp == 0.0);
  CHECK(a.a.imag() == 0.0);
  const Mat2c P = initial_coherence(s, Vec2(0.01, 0.02));
  CHECK(std::abs(P(0, 1)) == 0.0);
  CHECK(P(1, 1) == 0.0);
  CHECK(P(0, 0).real() == doctest::Approx(std::norm(initial_amplitudes(s, Vec2(0.01, 0.02)).a)));
  // Tail bound beyond 7 gamma_j / k.
  CHECK(std::norm(initial_amplitudes(s, Vec2(support_radius(s) * 1.001, 0)).a) < 1e-8);
}

TEST_CASE("anisotropic TM power") {
  SourceSpec s;
  s.kind = SourceKind::AnisotropicGaussianTMPower;
  const Mat2c P = initial_coherence(s, Vec2(0.05, 0.05));
  CHECK(P(0, 0).real() == doctest::Approx(std::exp(-0.5)).epsilon(1e-13));
  CHECK(std::abs(P(0, 1)) == 0.0);
  CHECK(P(1, 1) == 0.0);
  // Narrow along kappa1 - kappa2.
  CHECK(initial_coherence(s, Vec2(0.03, -0.03))(0, 0).real() <
        initial_coherence(s, Vec2(0.03, 0.03))(0, 0).real());
}

TEST_CASE("current density source") {
  const double gj = kTwoPi / 20;
  const SourceSpec lon = SourceSpec::gaussian_current(gj, 0.0, 0.0, 1.0);
  const Vec2 k(0.05, -0.08);
  const InitialAmplitudes a = initial_amplitudes(lon, k);
  const Vec2 q = lon.k * k / gj;
  const double expect = k.norm() * std::exp(-0.5 * q.squaredNorm()) /
                        (std::sqrt(beta(k)) * 2 * gj * gj);
  CHECK(a.a.real() == doctest::Approx(expect).epsilon(1e-14));
  CHECK(a.a_perp == 0.0);

  const SourceSpec mix = SourceSpec::gaussian_current(gj, cplx(0.3, 0.1), cplx(-0.7, 0.2), 0.4);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 50; ++i) {
    const Vec2 kk(u(rng), u(rng));
    const InitialAmplitudes b = initial_amplitudes(mix, kk);
    CHECK(b.b_perp == b.a_perp);
    const Mat2c P = initial_coherence(mix, kk);
    const double tr = P.trace().real();
    CHECK(std::abs(P.determinant()) <= 1e-14 * tr * tr + 1e-300);
    CHECK((P - P.adjoint()).norm() <= 1e-15 * tr);
  }
}

TEST_CASE("initial energy closed form") {
  SourceSpec s;
  s.gamma_j = kTwoPi / 50;
  FieldQuadrature q;
  q.n_radial = 64;
  CHECK(source_energy(s, q) == doctest::Approx(s.gamma_j * s.gamma_j / kTwoPi).epsilon(1e-6));
}

TEST_CASE("plane-wave fields are transverse and impedance-paired") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int i = 0; i < 20; ++i) {
    const Vec2 k(u(rng), u(rng));
    const cplx a(u(rng), u(rng)), ap(u(rng), u(rng));
    const FieldSample p = plane_wave_fields(k, a, ap);
    const Frame f = frame_vectors(k);
    CHECK(std::abs(p.e.dot(f.kvec.cast<cplx>())) < 1e-15);
    CHECK(std::abs(p.h.dot(f.kvec.cast<cplx>())) < 1e-15);
    const Vec3c h = (a * f.u_perp.cast<cplx>() - ap * f.u.cast<cplx>()) / std::sqrt(beta(k));
    CHECK((p.h - h).norm() < 1e-14);
    // Power flux of a single plane wave is |a|^2 + |a_perp|^2.
    const Vec2c ut = p.u_t();
    const double flux = (p.e(0) * std::conj(ut(0)) + p.e(1) * std::conj(ut(1))).real();
    CHECK(flux == doctest::Approx(std::norm(a) + std::norm(ap)).epsilon(1e-13));
  }
}

TEST_CASE("radiated field carries the source energy") {
  SourceSpec s;
  s.gamma_j = kTwoPi / 40;
  FieldQuadrature q;
  q.n_radial = 32;
  q.n_angular = 48;
  q.check = false;
  const double h = 1.5, half = 48.0;
  double flux = 0.0;
  for (double x = -half; x <= half; x += h)
    for (double y = -half; y <= half; y += h) {
      const FieldSample f = homogeneous_field(s, Vec3(x, y, 2.0), q);
      const Vec2c ut = f.u_t();
      flux += h * h * (f.e(0) * std::conj(ut(0)) + f.e(1) * std::conj(ut(1))).real();
    }
  CHECK(flux == doctest::Approx(source_energy(s, q)).epsilon(1e-2));
  CHECK_THROWS_AS(homogeneous_field(s, Vec3(0, 0, -1), q), ValidationError);
}
