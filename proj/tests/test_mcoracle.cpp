#include <doctest.h>

#include <cmath>

#include "polx/mcoracle.hpp"

using namespace polx;

namespace {

EnsembleConfig quick() {
  EnsembleConfig c;
  c.epsilon = 1e-2;
  c.n_realizations = 8;
  c.n_records = 4;
  return c;
}

}  // namespace

TEST_CASE("lattice") {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 10, kTwoPi / 10);
  const MCLattice lat = make_mc_lattice(m, EnsembleConfig{});
  CHECK(lat.size() == 24);
  CHECK(lat.dk == doctest::Approx(kTwoPi * m.gamma() / (m.k() * 8.0)));
  for (size_t i = 0; i < lat.size(); ++i) {
    CHECK(lat.nodes[i].x() == doctest::Approx((lat.index[i][0] + 0.5) * lat.dk));
    CHECK(lat.nodes[i].y() == doctest::Approx((lat.index[i][1] + 0.5) * lat.dk));
  }
}

TEST_CASE("synthesized medium statistics") {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 10, kTwoPi / 10);
  const EnsembleConfig c = quick();
  const SGrid sg = make_s_grid(m, c, c.epsilon / (20 * m.gamma()), 0.1);
  CHECK((sg.ns & (sg.ns - 1)) == 0);
  const Vec3 lags[] = {Vec3::Zero(), Vec3(1.0, 0.0, 0.5), Vec3(0.3, -0.7, 1.2)};
  const int n = 200;
  double mean = 0.0, mean2 = 0.0;
  double ac[3] = {0, 0, 0}, ac2[3] = {0, 0, 0};
  for (int r = 0; r < n; ++r) {
    const MediumRealization nu = synthesize_medium(m, c, sg, r);
    const double b = nu.box_mean();
    mean += b;
    mean2 += b * b;
    for (int l = 0; l < 3; ++l) {
      const double v = nu.box_autocorr(lags[l]);
      ac[l] += v;
      ac2[l] += v * v;
    }
    if (r == 0) {
      // Real field: conjugate-symmetric coefficients.
      for (int mx = -nu.mt; mx <= nu.mt; mx += 3)
        for (int my = -nu.mt; my <= nu.mt; my += 2)
          for (int s : {1, 5, 17}) {
            const cplx a = nu.c(mx, my, s), b2 = nu.c(-mx, -my, nu.ns - s);
            CHECK(std::abs(a - std::conj(b2)) <= 1e-15 * (std::abs(a) + 1e-300));
          }
      const MediumRealization again = synthesize_medium(m, c, sg, 0);
      CHECK(again.coef == nu.coef);
      CHECK(synthesize_medium(m, c, sg, 1).coef != nu.coef);
    }
  }
  auto within = [n](double s, double s2, double target) {
    const double mu = s / n, var = s2 / n - mu * mu;
    return std::abs(mu - target) <= 3.0 * std::sqrt(var / (n - 1));
  };
  CHECK(within(mean, mean2, 0.0));
  for (int l = 0; l < 3; ++l) CHECK(within(ac[l], ac2[l], m.autocorr(lags[l])));
}

TEST_CASE("zero medium leaves the amplitudes unchanged") {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 10, kTwoPi / 10);
  const EnsembleConfig c = quick();
  const MCLattice lat = make_mc_lattice(m, c);
  const double dz = c.epsilon / (20 * m.gamma());
  const SGrid sg = make_s_grid(m, c, dz, 0.05);
  const MediumRealization nu = synthesize_medium(m, c, sg, 0);
  std::vector<Vec2c> a0(lat.size(), Vec2c(1.0, cplx(0.0, 0.5)));
  const auto t = integrate_amplitudes(m, nu, c, lat, a0, dz, 0.05, true);
  for (const auto& row : t.a)
    for (size_t i = 0; i < lat.size(); ++i) CHECK((row[i] - a0[i]).norm() < 1e-14);
}

TEST_CASE("single node keeps its modulus") {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 10, kTwoPi / 10);
  const EnsembleConfig c = quick();
  MCLattice full = make_mc_lattice(m, c);
  MCLattice one;
  one.dk = full.dk;
  one.nodes = {full.nodes[0]};
  one.index = {full.index[0]};
  const double dz = c.epsilon / (20 * m.gamma());
  const SGrid sg = make_s_grid(m, c, dz, 0.05);
  const MediumRealization nu = synthesize_medium(m, c, sg, 3);
  const std::vector<Vec2c> a0{Vec2c(1.0, 0.0)};
  const auto t = integrate_amplitudes(m, nu, c, one, a0, dz, 0.05);
  for (const auto& row : t.a) {
    CHECK(std::abs(std::abs(row[0](0)) - 1.0) < 1e-12);
    CHECK(std::abs(row[0](1)) < 1e-12);
  }
}

TEST_CASE("ensemble conserves energy and is deterministic") {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 10, kTwoPi / 10);
  EnsembleConfig c = quick();
  const MCLattice lat = make_mc_lattice(m, c);
  std::vector<Vec2c> a0(lat.size(), Vec2c(1.0, 0.0));
  const double dz = c.epsilon / (20 * m.gamma());
  c.exec = Exec::Serial;
  const auto s = ensemble_moments(m, c, lat, a0, dz, 0.04);
  c.exec = Exec::Parallel;
  const auto p = ensemble_moments(m, c, lat, a0, dz, 0.04);
  CHECK(s.max_drift < 1e-12);
  REQUIRE(s.mean.size() == p.mean.size());
  for (size_t t = 0; t < s.mean.size(); ++t)
    for (size_t i = 0; i < lat.size(); ++i) {
      CHECK(s.mean[t][i] == p.mean[t][i]);
      CHECK(s.coherence[t][i].p == p.coherence[t][i].p);
    }
  // Total |a|^2 is unchanged per realization.
  for (const auto& real : s.samples) {
    double e = 0.0;
    for (const auto& a : real.back()) e += a.squaredNorm();
    CHECK(e == doctest::Approx(double(lat.size())).epsilon(1e-12));
  }
}

TEST_CASE("ensemble input validation") {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 10, kTwoPi / 10);
  EnsembleConfig c = quick();
  c.epsilon = 0.5;
  CHECK_THROWS_AS(mc_verify(m, c), ValidationError);
}

// Slow (about a minute and a half); run through its own ctest entry.
TEST_CASE("decay gap shrinks as epsilon decreases" * doctest::skip()) {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 10, kTwoPi / 10);
  std::vector<double> gap, noise;
  for (double eps : {1e-2, 3e-3, 1e-3}) {
    EnsembleConfig c;
    c.epsilon = eps;
    c.n_realizations = 200;
    const MCReport r = mc_verify(m, c);
    double g = 0.0, s2 = 0.0;
    for (const NodeDecay& d : r.decay) {
      g += std::abs(d.rate_mc - d.rate_pred);
      s2 += d.rate_se * d.rate_se;
    }
    const double n = static_cast<double>(r.decay.size());
    gap.push_back(g / n);
    noise.push_back(std::sqrt(s2 / n / n));
    MESSAGE("epsilon " << eps << ": mean |rate gap| " << gap.back() << " +- " << noise.back());
  }
  for (size_t i = 1; i < gap.size(); ++i)
    CHECK(gap[i] <= gap[i - 1] + 3.0 * std::hypot(noise[i], noise[i - 1]));
  CHECK(gap.back() < gap.front());
}
