// Randomized property checks shared by the standalone runner and acceptance.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "polx/geometry.hpp"
#include "polx/transport.hpp"

namespace polx::props {

struct Suite {
  std::string name;
  std::function<bool(std::mt19937_64&)> check;  // one random case
};

inline Vec2 random_kappa(std::mt19937_64& rng, double rmax = 0.95) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = rmax * std::sqrt(u(rng)) + 1e-6, t = kTwoPi * u(rng);
  return {r * std::cos(t), r * std::sin(t)};
}

inline bool frame_orthonormal(std::mt19937_64& rng) {
  const Frame f = frame_vectors(random_kappa(rng));
  Eigen::Matrix3d M;
  M << f.u, f.u_perp, f.kvec;
  return (M.transpose() * M - Eigen::Matrix3d::Identity()).norm() < 1e-13 &&
         std::abs(M.determinant() - 1.0) < 1e-13;
}

inline bool eigen_residuals(std::mt19937_64& rng) {
  const Vec2 k = random_kappa(rng);
  const Eigensystem s = eigensystem(k);
  const Mat4 M = m_matrix(k);
  const double b = s.beta, scale = M.norm() * 4.0 / b;
  return (M * s.psi_plus - b * s.psi_plus).norm() < 1e-12 * scale &&
         (M * s.psi_plus_perp - b * s.psi_plus_perp).norm() < 1e-12 * scale &&
         (M * s.psi_minus + b * s.psi_minus).norm() < 1e-12 * scale &&
         (M * s.psi_minus_perp + b * s.psi_minus_perp).norm() < 1e-12 * scale;
}

inline bool gamma_transpose(std::mt19937_64& rng) {
  const Vec2 a = random_kappa(rng), b = random_kappa(rng);
  const Mat2 g = gamma_block(Block::aa, a, b);
  return (gamma_block(Block::aa, b, a) - g.transpose()).norm() <= 1e-12 * g.norm();
}

inline bool stokes_cauchy_schwarz(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Matrix2cd A;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) A(i, j) = cplx(n(rng), n(rng));
  // Mix of rank-one and full-rank samples.
  if (rng() % 4 == 0) A.col(1) = A.col(0) * cplx(n(rng), n(rng));
  const Stokes4 s = stokes(Mat2c(A * A.adjoint()));
  const double v = std::sqrt(s.s2 * s.s2 + s.s3 * s.s3 + s.s4 * s.s4);
  return v <= s.s1 * (1.0 + 1e-12) && s.pol >= 0.0 && s.pol <= 1.0 + 1e-12;
}

inline bool grad_beta_fd(std::mt19937_64& rng) {
  const Vec2 k = random_kappa(rng, 0.9);
  const double h = 1e-6;
  const Vec2 fd((beta(k + Vec2(h, 0)) - beta(k - Vec2(h, 0))) / (2 * h),
                (beta(k + Vec2(0, h)) - beta(k - Vec2(0, h))) / (2 * h));
  const Vec2 g = grad_beta(k);
  return (fd - g).norm() <= 1e-6 * (1.0 + g.norm());
}

inline std::vector<Suite> suites() {
  return {{"frame orthonormality", frame_orthonormal},
          {"eigen residuals of M", eigen_residuals},
          {"coupling transpose symmetry", gamma_transpose},
          {"Stokes Cauchy-Schwarz", stokes_cauchy_schwarz},
          {"grad beta vs finite difference", grad_beta_fd}};
}

/// Failure count of one suite over `cases` random draws.
inline int run_suite(const Suite& s, std::uint64_t seed, int cases) {
  std::mt19937_64 rng(seed);
  int fails = 0;
  for (int i = 0; i < cases; ++i)
    if (!s.check(rng)) ++fails;
  return fails;
}

}  // namespace polx::props
