#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "polx/medium.hpp"
#include "polx/quadrature.hpp"

using namespace polx;

namespace {
SpectralMedium gauss() { return SpectralMedium::gaussian(1.0, kTwoPi / 50, kTwoPi / 50); }
}  // namespace

TEST_CASE("gaussian autocorrelation values and evenness") {
  const auto m = gauss();
  CHECK(m.autocorr(Vec3::Zero()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.autocorr(Vec3(1, 0, 0)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    const Vec3 r(n(rng), n(rng), n(rng));
    CHECK(m.autocorr(r) == m.autocorr(-r));
  }
}

TEST_CASE("gaussian spectral densities") {
  const auto m = gauss();
  CHECK(m.psd3(Vec3::Zero()) == doctest::Approx(15.749609945722419).epsilon(1e-14));
  CHECK(m.psd3(Vec3(10, 0, 0)) < 1e-20);
  CHECK(m.psd_partial(Vec2(0, 0), 0.0) == doctest::Approx(kTwoPi).epsilon(1e-14));
  CHECK(m.psd_partial(Vec2(1, 0), 0.0) == doctest::Approx(kTwoPi * std::exp(-0.5)).epsilon(1e-14));
  const cplx d0 = m.dispersion_integral(Vec2(0, 0), 0.0);
  CHECK(d0.real() == doctest::Approx(kTwoPi * std::sqrt(kPi / 2)).epsilon(1e-14));
  CHECK(std::abs(d0.imag()) < 1e-15);
  // Large b: the tail behaves as 2 pi i / b.
  CHECK(std::abs(m.dispersion_integral(Vec2(0, 0), 200.0) - cplx(0.0, -kTwoPi / 200)) < 1e-5);
  CHECK(std::abs(m.dispersion_integral(Vec2(0, 0), 200.0)) <
        std::abs(m.dispersion_integral(Vec2(0, 0), 20.0)));
}

TEST_CASE("spectral identities hold for every model") {
  CorrelationTable tab;
  for (int i = 0; i <= 80; ++i) tab.rt.push_back(0.1 * i);
  for (int j = 0; j <= 80; ++j) tab.rz.push_back(0.1 * j);
  for (double a : tab.rt)
    for (double b : tab.rz) tab.values.push_back(std::exp(-0.5 * (a * a + b * b / 2.25)));
  const std::vector<SpectralMedium> models = {
      gauss(), SpectralMedium::gaussian_transverse(1.0, 0.2, 0.2, 1.5),
      SpectralMedium::tabulated(1.0, 0.2, 0.2, tab)};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  const Rule z = composite_gauss_legendre(-12.0, 12.0, 24, 48);
  for (const auto& m : models) {
    // The tabulated model carries interpolation error of the tables.
    const bool tab_model = m.model() == MediumModel::Tabulated;
    const double tol = tab_model ? 2e-3 : 1e-6, tol_d = tab_model ? 2e-3 : 1e-7;
    for (int i = 0; i < 20; ++i) {
      const Vec2 qt(u(rng), u(rng));
      const double qz = u(rng);
      const double p = m.psd3(Vec3(qt.x(), qt.y(), qz));
      CHECK(p >= 0.0);
      // Fourier slice: int psd_partial(qt, zeta) exp(-i qz zeta) dzeta.
      double acc = 0.0;
      for (size_t k = 0; k < z.size(); ++k)
        acc += z.w[k] * m.psd_partial(qt, z.x[k]) * std::cos(qz * z.x[k]);
      CHECK(acc == doctest::Approx(p).epsilon(tol).scale(1e-3));
      CHECK(m.dispersion_integral(qt, qz).real() == doctest::Approx(0.5 * p).epsilon(tol_d).scale(1e-6));
    }
  }
}

TEST_CASE("tabulated gaussian matches the analytic model") {
  CorrelationTable tab;
  for (int i = 0; i <= 80; ++i) tab.rt.push_back(0.1 * i);
  for (int j = 0; j <= 80; ++j) tab.rz.push_back(0.1 * j);
  for (double a : tab.rt)
    for (double b : tab.rz) tab.values.push_back(std::exp(-0.5 * (a * a + b * b)));
  const auto t = SpectralMedium::tabulated(1.0, 0.2, 0.2, tab);
  const auto g = SpectralMedium::gaussian(1.0, 0.2, 0.2);
  CHECK(t.r0() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.autocorr(Vec3(0.33, 0.41, 0.72)) == doctest::Approx(g.autocorr(Vec3(0.33, 0.41, 0.72))).epsilon(1e-4));
  CHECK(t.autocorr(Vec3(20, 0, 0)) == 0.0);
  for (double q : {0.0, 0.7, 1.9})
    for (double b : {0.0, 0.5, 2.0}) {
      CHECK(t.psd3_tz(q * q, b) == doctest::Approx(g.psd3_tz(q * q, b)).epsilon(5e-4).scale(1e-3));
      const cplx dt = t.dispersion_tz(q * q, b), dg = g.dispersion_tz(q * q, b);
      CHECK(std::abs(dt - dg) < 1e-3);
    }
}

TEST_CASE("correlation table reader") {
  const auto path = std::filesystem::temp_directory_path() / "polx_table_test.csv";
  {
    std::ofstream f(path);
    f << "rt,rz,value\n";
    for (double a : {0.0, 1.0, 2.0, 3.0})
      for (double b : {0.0, 1.0, 2.0, 3.0}) f << a << "," << b << "," << std::exp(-0.5 * (a * a + b * b)) << "\n";
  }
  const CorrelationTable t = read_correlation_table(path.string());
  CHECK(t.rt.size() == 4);
  CHECK(t.rz.size() == 4);
  CHECK(t.values[5] == doctest::Approx(std::exp(-1.0)));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_correlation_table("/nonexistent/table.csv"), ValidationError);
}

TEST_CASE("medium parameter validation") {
  CHECK_THROWS_AS(SpectralMedium::gaussian(0.0, 0.1, 0.1), ValidationError);
  CHECK_THROWS_AS(SpectralMedium::gaussian(1.0, 1.5, 0.1), ValidationError);
  CHECK_THROWS_AS(SpectralMedium::gaussian(1.0, 0.1, -1.0), ValidationError);
  CHECK_THROWS_AS(SpectralMedium::gaussian_transverse(1.0, 0.1, 0.1, 0.0), ValidationError);
}
