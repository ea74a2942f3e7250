#pragma once

#include "polx/medium.hpp"
#include "polx/types.hpp"

namespace polx {

/// Orthonormal basis attached to a 3D wave vector: z0 along K, z1 in the
/// meridian plane, z2 azimuthal.
struct RTBasis {
  Vec3 z0, z1, z2;
};
RTBasis rt_basis(const Vec3& K);

/// (z^l(K) . z^q(K')) for l, q in {1, 2}; both vectors on |K| = k.
Mat2 t_matrix(const Vec3& K, const Vec3& Kp, double k);

/// Planar local-polar quadrature around kappa on |kappa'| < radius.
struct DiskQuadrature {
  int n_phi = 128;
  int n_window = 48;
  int n_outer = 48;
  double window = 8.0;  // in units of gamma / k
  double radius = 0.99;
};

/// Total cross section matrix (c0 = 1); its scalar value is trace / 2.
Mat2 sigma_matrix(const SpectralMedium& m, const Vec2& kappa,
                  const DiskQuadrature& q = {});
/// Scalar total cross section; throws NumericalError when the matrix is
/// not a multiple of the identity within `tol`.
double sigma_total(const SpectralMedium& m, const Vec2& kappa,
                   const DiskQuadrature& q = {}, double tol = 1e-6);

/// Gauss-Legendre in cos(theta) times trapezoid in phi on the unit sphere,
/// with a refinement band near the forward direction.
struct SphereQuadrature {
  int n_theta = 64;
  int n_phi = 128;
  int n_window = 64;
  double window = 10.0;  // band depth 1 - cos(theta) = (window gamma / k)^2
};

/// Re Q from the full-sphere parametrization (isotropic media only).
Mat2 re_q_sphere(const SpectralMedium& m, const Vec2& kappa,
                 const SphereQuadrature& q = {});

}  // namespace polx
