#pragma once

#include <memory>
#include <vector>

#include "polx/grid.hpp"
#include "polx/medium.hpp"

namespace polx {

/// Quadrature for the kernel integral over propagation directions. The
/// unit sphere is parametrized by geodesic polar coordinates (theta, phi)
/// centred on (kappa, beta); the cap kappa'_z >= sqrt(1 - radius^2) is the
/// disk |kappa'| < radius. In these coordinates d kappa' = beta' sin(theta)
/// dtheta dphi, which removes the 1/beta' edge singularity.
struct KernelQuadrature {
  int n_phi = 128;
  int n_window = 32;     // Gauss points on the peak window
  int n_middle = 32;     // Gauss points on the transverse-decay band
  int n_outer = 48;      // Gauss points on the remainder of the cap
  double window = 8.0;   // peak window half-width in units of gamma / k
  double middle = 12.0;  // band half-width in units of gamma / (k beta)
  double radius = 1.0;   // integration disk radius

  KernelQuadrature refined() const;
};

/// Q(kappa): coherent-wave scattering kernel, complex symmetric.
Mat2c q_matrix(const SpectralMedium& m, const Vec2& kappa,
               const KernelQuadrature& q = {});
/// Real part of Q assembled directly from the power spectral density.
Mat2 re_q_psd(const SpectralMedium& m, const Vec2& kappa,
              const KernelQuadrature& q = {});
/// S = -Q - Q^dagger; throws NumericalError if not positive definite.
Mat2 s_matrix(const SpectralMedium& m, const Vec2& kappa,
              const KernelQuadrature& q = {});
Mat2 s_from_q(const Mat2c& Q);

struct MeanFreePaths {
  double tm, te;
};
MeanFreePaths mean_free_paths_from_q(const Mat2c& Q, double offdiag_tol = 1e-8);
MeanFreePaths mean_free_paths(const SpectralMedium& m, const Vec2& kappa,
                              const KernelQuadrature& q = {});

/// exp(A) for a 2x2 complex matrix.
Mat2c expm2(const Mat2c& A);

struct ScatteringKernelField {
  std::shared_ptr<const DirectionGrid> grid;
  std::vector<Mat2c> Q;
  std::vector<Mat2> S;
  std::vector<double> lambda1, lambda2;
  std::vector<double> mfp_tm, mfp_te;
  size_t size() const { return Q.size(); }
};

struct KernelFieldOptions {
  KernelQuadrature quad{};
  /// Transverse-isotropic media: evaluate one node per ring (polar grid) or
  /// per distinct radius and rotate; exact for these media.
  bool reuse_rings = false;
  /// Non-polar grids: if > 0, evaluate Q at this many radii and spline the
  /// diagonal entries (transverse-isotropic media only).
  int radial_table = 0;
  Exec exec = Exec::Parallel;
};

ScatteringKernelField assemble_kernel_field(
    const SpectralMedium& m, std::shared_ptr<const DirectionGrid> grid,
    const KernelFieldOptions& opt = {});

/// Fills S, eigenvalues and mean free paths from Q.
void finalize_kernel_field(ScatteringKernelField& f);

using Vec2c = Eigen::Vector2cd;
std::vector<Vec2c> mean_amplitude(const ScatteringKernelField& f,
                                  const std::vector<Vec2c>& a0, double z);

/// exp(-lambda1 z / 2) and exp(-lambda2 z / 2).
std::pair<double, double> gronwall_bounds(const ScatteringKernelField& f,
                                          size_t node, double z);

}  // namespace polx
