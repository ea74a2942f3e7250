#pragma once

#include <cmath>

#include "polx/types.hpp"

namespace polx {

/// sqrt(1 - |kappa|^2); throws ValidationError for |kappa| >= 1.
double beta(const Vec2& kappa);
/// -kappa / beta(kappa).
Vec2 grad_beta(const Vec2& kappa);

inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

struct Frame {
  Vec3 u;       // TM direction
  Vec3 u_perp;  // TE direction
  Vec3 kvec;    // unit propagation direction (kappa, beta)
};
Frame frame_vectors(const Vec2& kappa);

struct Eigensystem {
  Vec4 psi_plus, psi_plus_perp, psi_minus, psi_minus_perp;
  double beta;
};
/// 4x4 matrix acting on (E_t, U_t) in the homogeneous problem.
Mat4 m_matrix(const Vec2& kappa);
Eigensystem eigensystem(const Vec2& kappa);

enum class Block { aa, bb, ab, ba };
/// Mode coupling block; `aa` couples forward to forward.
Mat2 gamma_block(Block kind, const Vec2& kappa, const Vec2& kappa_prime);
/// gamma_block(aa) with the moduli precomputed; no validation.
inline Mat2 gamma_aa_raw(const Vec2& k, double nk, double bk, const Vec2& kp,
                         double nkp, double bkp) {
  const double c = (k.x() * kp.x() + k.y() * kp.y()) / (nk * nkp);
  const double s = (k.x() * kp.y() - k.y() * kp.x()) / (nk * nkp);
  const double sb = std::sqrt(bk * bkp);
  const double r = std::sqrt(bk / bkp);
  Mat2 g;
  g(0, 0) = nk * nkp / sb + c * sb;
  g(0, 1) = -s * r;
  g(1, 0) = s / r;
  g(1, 1) = c / sb;
  return g;
}
/// Limit of the aa block under kappa -> gamma kappa, gamma -> 0.
Mat2 gamma_hf(const Vec2& kappa, const Vec2& kappa_prime);

}  // namespace polx
