#include <doctest.h>

#include <random>

#include "polx/geometry.hpp"

using namespace polx;

TEST_CASE("beta and its gradient") {
  CHECK(beta(Vec2(0, 0)) == 1.0);
  CHECK(beta(Vec2(0.6, 0)) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(beta(Vec2(0, 0.99)) == doctest::Approx(0.14106735979665885).epsilon(1e-14));
  CHECK(grad_beta(Vec2(0, 0)).norm() == 0.0);
  CHECK((grad_beta(Vec2(0.6, 0)) - Vec2(-0.75, 0)).norm() < 1e-15);
  CHECK_THROWS_AS(beta(Vec2(1.0, 0.0)), ValidationError);
}

TEST_CASE("frame vectors at a reference direction") {
  const Frame f = frame_vectors(Vec2(0.6, 0));
  CHECK((f.u - Vec3(0.8, 0, -0.6)).norm() < 1e-15);
  CHECK((f.u_perp - Vec3(0, 1, 0)).norm() < 1e-15);
  CHECK((f.kvec - Vec3(0.6, 0, 0.8)).norm() < 1e-15);
  CHECK_THROWS_AS(frame_vectors(Vec2(0, 0)), ValidationError);
}

TEST_CASE("eigensystem of the homogeneous operator") {
  const Eigensystem e = eigensystem(Vec2(0.6, 0));
  CHECK((e.psi_plus - Vec4(std::sqrt(0.8), 0, 1 / std::sqrt(0.8), 0)).norm() < 1e-14);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int i = 0; i < 50; ++i) {
    const Vec2 k(u(rng), u(rng));
    const Eigensystem s = eigensystem(k);
    const Mat4 M = m_matrix(k);
    CHECK((M * s.psi_plus - s.beta * s.psi_plus).norm() < 1e-12);
    CHECK((M * s.psi_plus_perp - s.beta * s.psi_plus_perp).norm() < 1e-12);
    CHECK((M * s.psi_minus + s.beta * s.psi_minus).norm() < 1e-12);
    CHECK((M * s.psi_minus_perp + s.beta * s.psi_minus_perp).norm() < 1e-12);
    Mat4 V;
    V << s.psi_plus, s.psi_plus_perp, s.psi_minus, s.psi_minus_perp;
    CHECK(std::abs(V.determinant()) > 1e-6);
  }
}

TEST_CASE("coupling block reference values") {
  const Mat2 same = gamma_block(Block::aa, Vec2(0.6, 0), Vec2(0.6, 0));
  CHECK((same - 1.25 * Mat2::Identity()).norm() < 1e-14);
  Mat2 expect;
  expect << 0.45, -1, 1, 0;
  CHECK((gamma_block(Block::aa, Vec2(0.6, 0), Vec2(0, 0.6)) - expect).norm() < 1e-14);
  CHECK((gamma_hf(Vec2(0.3, 0.2), Vec2(0.3, 0.2)) - Mat2::Identity()).norm() < 1e-15);
  Mat2 rot;
  rot << 0, -1, 1, 0;
  CHECK((gamma_hf(Vec2(1, 0), Vec2(0, 1)) - rot).norm() < 1e-15);
}

TEST_CASE("coupling blocks: symmetry and raw form") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.65, 0.65);
  for (int i = 0; i < 100; ++i) {
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng));
    const Mat2 g = gamma_block(Block::aa, a, b);
    CHECK((gamma_block(Block::aa, b, a) - g.transpose()).norm() < 1e-12 * g.norm());
    CHECK((gamma_aa_raw(a, a.norm(), beta(a), b, b.norm(), beta(b)) - g).norm() < 1e-13 * g.norm());
    for (Block k : {Block::bb, Block::ab, Block::ba}) CHECK(gamma_block(k, a, b).allFinite());
  }
}

TEST_CASE("coupling block approaches its high-frequency limit") {
  const Vec2 a(0.8, -0.3), b(-0.2, 0.9);
  double prev = 1e300;
  for (double g : {1e-1, 1e-2, 1e-3}) {
    const double err = (gamma_block(Block::aa, g * a, g * b) - gamma_hf(a, b)).norm();
    CHECK(err < prev);
    CHECK(err < 2.0 * g);
    prev = err;
  }
}
