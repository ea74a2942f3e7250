#include "polx/geometry.hpp"

#include <cmath>

namespace polx {

namespace {
void require_nonzero(const Vec2& k) {
  if (!(k.norm() > 0.0))
    throw ValidationError("transverse wave vector must be nonzero");
}
}  // namespace

double beta(const Vec2& kappa) {
  const double n2 = kappa.squaredNorm();
  if (!(n2 < 1.0)) throw ValidationError("|kappa| >= 1 is not propagating");
  return std::sqrt(1.0 - n2);
}

Vec2 grad_beta(const Vec2& kappa) { return -kappa / beta(kappa); }

Frame frame_vectors(const Vec2& kappa) {
  const double b = beta(kappa);
  require_nonzero(kappa);
  const double n = kappa.norm();
  const Vec2 h = kappa / n;
  Frame f;
  f.u = Vec3(b * h.x(), b * h.y(), -n);
  f.u_perp = Vec3(-h.y(), h.x(), 0.0);
  f.kvec = Vec3(kappa.x(), kappa.y(), b);
  return f;
}

Mat4 m_matrix(const Vec2& kappa) {
  const Vec2 kp = perp(kappa);
  Mat4 m = Mat4::Zero();
  m.block<2, 2>(0, 2) = Mat2::Identity() - kappa * kappa.transpose();
  m.block<2, 2>(2, 0) = Mat2::Identity() - kp * kp.transpose();
  return m;
}

Eigensystem eigensystem(const Vec2& kappa) {
  const double b = beta(kappa);
  require_nonzero(kappa);
  const Vec2 h = kappa / kappa.norm();
  const Vec2 hp = perp(h);
  const double sb = std::sqrt(b);
  Eigensystem e;
  e.beta = b;
  e.psi_plus << sb * h, h / sb;
  e.psi_minus << -sb * h, h / sb;
  e.psi_plus_perp << hp / sb, sb * hp;
  e.psi_minus_perp << hp / sb, -sb * hp;
  return e;
}

Mat2 gamma_block(Block kind, const Vec2& kappa, const Vec2& kappa_prime) {
  const double b = beta(kappa), bp = beta(kappa_prime);
  require_nonzero(kappa);
  require_nonzero(kappa_prime);
  const double n = kappa.norm(), np = kappa_prime.norm();
  Mat2 g = gamma_aa_raw(kappa, n, b, kappa_prime, np, bp);
  const double c = kappa.dot(kappa_prime) / (n * np);
  const double sb = std::sqrt(b * bp);
  switch (kind) {
    case Block::aa:
      break;
    case Block::bb:
      g(0, 0) = -g(0, 0);
      g(1, 1) = -g(1, 1);
      break;
    case Block::ab:
      g(0, 0) = n * np / sb - c * sb;
      g(1, 0) = -g(1, 0);
      break;
    case Block::ba:
      g(0, 0) = -n * np / sb + c * sb;
      g(1, 0) = -g(1, 0);
      g(1, 1) = -g(1, 1);
      break;
  }
  return g;
}

Mat2 gamma_hf(const Vec2& kappa, const Vec2& kappa_prime) {
  require_nonzero(kappa);
  require_nonzero(kappa_prime);
  const double d = kappa.norm() * kappa_prime.norm();
  const double c = kappa.dot(kappa_prime) / d;
  const double s = perp(kappa).dot(kappa_prime) / d;
  Mat2 g;
  g << c, -s, s, c;
  return g;
}

}  // namespace polx
