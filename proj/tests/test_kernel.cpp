#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "polx/geometry.hpp"
#include "polx/kernel.hpp"

using namespace polx;

namespace {
const double kGammas[] = {kTwoPi / 50, kTwoPi / 17, kTwoPi / 10};
}

TEST_CASE("kernel symmetry, definiteness and isotropy") {
  for (double g : kGammas) {
    const auto m = SpectralMedium::gaussian(1.0, g, g);
    for (double r : {0.05, 0.3, 0.6, 0.85}) {
      const Vec2 k(r * 0.6, r * 0.8);
      const Mat2c Q = q_matrix(m, k);
      CHECK((Q - Q.transpose()).norm() < 1e-12 * Q.norm());
      CHECK(std::abs(Q(0, 1)) < 1e-10 * Q.norm());
      CHECK(std::abs(Q(0, 0).real() - Q(1, 1).real()) < 1e-8 * std::abs(Q(0, 0).real()));
      const Mat2 R = re_q_psd(m, k);
      CHECK((Q.real() - R).norm() < 1e-8 * R.norm());
      const Mat2 S = s_matrix(m, k);
      CHECK((S + 2.0 * Q.real()).norm() < 1e-12 * S.norm());
      Eigen::SelfAdjointEigenSolver<Mat2> es(S);
      CHECK(es.eigenvalues()(0) > 0.0);
      CHECK(std::abs(es.eigenvalues()(1) - es.eigenvalues()(0)) < 1e-8 * es.eigenvalues()(1));
    }
  }
}

TEST_CASE("kernel quadrature is converged") {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 50, kTwoPi / 50);
  const KernelQuadrature q;
  for (double r : {0.1, 0.5}) {
    const Mat2c a = q_matrix(m, Vec2(r, 0), q), b = q_matrix(m, Vec2(r, 0), q.refined());
    CHECK((a - b).norm() < 1e-6 * b.norm());
  }
}

TEST_CASE("mean free paths: monotone in |kappa| and ordered in gamma") {
  std::vector<double> prev;
  for (double g : kGammas) {
    const auto m = SpectralMedium::gaussian(1.0, g, g);
    std::vector<double> cur;
    double last = 1e300;
    for (double r = 0.05; r <= 0.9 + 1e-12; r += 0.05) {
      const MeanFreePaths mf = mean_free_paths(m, Vec2(r, 0));
      CHECK(mf.tm < last);
      last = mf.tm;
      cur.push_back(mf.tm);
    }
    // Fixed alpha: the path length grows with gamma.
    if (!prev.empty())
      for (size_t i = 0; i < cur.size(); ++i) CHECK(cur[i] > prev[i]);
    prev = cur;
  }
}

TEST_CASE("mean free path high-frequency anchor") {
  const double g = 1e-3, k = kTwoPi;
  const auto m = SpectralMedium::gaussian(1.0, g, g);
  const double mfp = mean_free_paths(m, Vec2(1e-5, 0)).tm;
  const double anchor = 8.0 * g / (k * k * std::sqrt(kTwoPi));
  CHECK(std::abs(mfp - anchor) < 5e-2 * anchor);
}

TEST_CASE("matrix exponential and coherent amplitude") {
  Mat2c A;
  A << cplx(-1.2, 0.3), cplx(0.2, -0.1), cplx(0.2, -0.1), cplx(-0.7, 0.05);
  for (double s : {1.0, 1e-4, 1e-9}) {
    const Mat2c B = (s * A).eval();
    const Mat2c ref = B.exp();
    CHECK((expm2(B) - ref).norm() < 1e-14 * ref.norm());
  }
  Mat2c D = Mat2c::Identity() * cplx(-0.5, 1.0);
  CHECK((expm2(D) - D.exp()).norm() < 1e-15);

  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 17, kTwoPi / 17);
  auto grid = std::make_shared<const DirectionGrid>(DirectionGrid::polar(6, 8, 0.6));
  ScatteringKernelField f = assemble_kernel_field(m, grid);
  std::vector<Vec2c> a0(grid->size(), Vec2c(1.0, 0.0));
  const auto same = mean_amplitude(f, a0, 0.0);
  for (size_t i = 0; i < a0.size(); ++i) CHECK((same[i] - a0[i]).norm() == 0.0);
  std::vector<Vec2c> mixed(grid->size(), Vec2c(cplx(0.3, 0.4), cplx(-0.5, 0.2)));
  for (double z : {0.01, 0.05, 0.1, 0.3}) {
    const auto a = mean_amplitude(f, a0, z);
    const auto b = mean_amplitude(f, mixed, z);
    for (size_t i = 0; i < a0.size(); ++i) {
      CHECK(std::abs(a[i](0)) ==
            doctest::Approx(std::exp(f.Q[i](0, 0).real() * z)).epsilon(1e-14));
      const auto [lo, hi] = gronwall_bounds(f, i, z);
      const double n0 = mixed[i].norm(), nz = b[i].norm();
      CHECK(nz >= lo * n0 * (1 - 1e-14));
      CHECK(nz <= hi * n0 * (1 + 1e-14));
    }
  }
}

TEST_CASE("kernel field: ring reuse, angle independence and execution modes") {
  const auto m = SpectralMedium::gaussian(1.0, kTwoPi / 17, kTwoPi / 17);
  auto grid = std::make_shared<const DirectionGrid>(DirectionGrid::polar(4, 6, 0.7));
  KernelFieldOptions serial;
  serial.exec = Exec::Serial;
  KernelFieldOptions par;
  par.exec = Exec::Parallel;
  KernelFieldOptions rings;
  rings.reuse_rings = true;
  const auto a = assemble_kernel_field(m, grid, serial);
  const auto b = assemble_kernel_field(m, grid, par);
  const auto c = assemble_kernel_field(m, grid, rings);
  for (size_t i = 0; i < grid->size(); ++i) {
    CHECK(a.Q[i] == b.Q[i]);
    CHECK((a.Q[i] - c.Q[i]).norm() < 1e-8 * a.Q[i].norm());
    const size_t ring0 = (i / grid->n_angular) * grid->n_angular;
    CHECK((a.Q[i] - a.Q[ring0]).norm() < 1e-8 * a.Q[i].norm());
    CHECK(a.lambda1[i] >= a.lambda2[i]);
    CHECK(a.lambda2[i] > 0.0);
  }
}

TEST_CASE("transverse-isotropic medium has TE/TM split but no coupling") {
  const auto m = SpectralMedium::gaussian_transverse(1.0, kTwoPi / 17, kTwoPi / 17, 2.0);
  const Mat2c Q = q_matrix(m, Vec2(0.3, 0.4));
  CHECK(std::abs(Q(0, 1)) < 1e-10 * Q.norm());
  CHECK(std::abs(Q(0, 0).real() - Q(1, 1).real()) > 1e-6 * std::abs(Q(0, 0).real()));
  CHECK_THROWS_AS(q_matrix(m, Vec2(0.0, 0.0)), ValidationError);
}
