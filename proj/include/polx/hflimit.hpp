#pragma once

#include <vector>

#include "polx/medium.hpp"
#include "polx/types.hpp"

namespace polx {

/// Scalar Q_hf with lim gamma Q(gamma kappa) = Q_hf I.
double q_hf(const SpectralMedium& m);
/// Same value by 2D quadrature of the spectral integral.
double q_hf_quadrature(const SpectralMedium& m);
/// -1 / Q_hf: mean free path in rescaled range units.
double hf_mfp(const SpectralMedium& m);
/// Leading small-gamma term (gamma / k^2) 8 beta^2 / (alpha^2 int R(kappa zeta / beta, zeta) d zeta).
double hf_mfp_leading(const SpectralMedium& m, const Vec2& kappa);
/// 8 / (k^2 ell alpha^2 int R(0, zeta) d zeta).
double paraxial_mfp(const SpectralMedium& m, double ell = 1.0);

/// Rotation taking (TM, TE) components at kappa to (x1, x2) components.
Mat2 hf_rotation(const Vec2& kappa);
Mat2c rotate_to_cartesian(const Mat2c& P, const Vec2& kappa);
Mat2c rotate_from_cartesian(const Mat2c& Pt, const Vec2& kappa);

/// Periodic lattice of rescaled wave vectors, nodes at (m - n/2 + 1/2) h.
struct HFLattice {
  int n = 0;
  double h = 0.0;
  std::vector<Vec2> nodes;  // row-major, index = a * n + b
  double weight() const { return h * h; }
  size_t size() const { return nodes.size(); }
};

/// Lattice covering |kappa| <= radius plus `pad` on each side; spacing
/// defaults to 1/(4k). The side is rounded up to a power of two.
HFLattice make_hf_lattice(double k, double radius, double spacing = 0.0,
                          double pad = -1.0);

struct HFCoherenceField {
  HFLattice lattice;
  std::vector<Mat2c> p_tilde;  // Cartesian components
  double z = 0.0;
};

/// x1-polarized start with power exp(-k^2 |kappa|^2 / (2 kbar_j^2)).
HFCoherenceField hf_initial_x1(const HFLattice& lat, double kbar_j, double k);

struct HFTrajectoryRow {
  double z, energy, max_cross;  // max_cross: max |P22|, |P12| over nodes
};

struct HFEvolveResult {
  HFCoherenceField final;
  std::vector<HFTrajectoryRow> trajectory;
};

/// RK4 for the scalar-kernel evolution of each Cartesian entry. The
/// periodic convolution is diagonal in the discrete Fourier basis, where
/// the RK4 step is applied mode by mode.
HFEvolveResult evolve_p_tilde(const SpectralMedium& m, const HFCoherenceField& P0,
                              double z_end, double dz, int record_every = 1);

/// Discrete kernel weights (k^2 alpha^2/4)(k^2/(2 pi)^2) R~(k d, 0) h^2.
double hf_kernel_weight(const SpectralMedium& m, const Vec2& d, double h);

/// Right-hand side of the TM/TE-basis high-frequency transport on the same
/// periodic lattice, by direct summation (small lattices only).
std::vector<Mat2c> trhf_rhs(const SpectralMedium& m, const HFLattice& lat,
                            const std::vector<Mat2c>& P);
/// The Cartesian-basis right-hand side by direct summation.
std::vector<Mat2c> tilde_rhs(const SpectralMedium& m, const HFLattice& lat,
                             const std::vector<Mat2c>& Pt);

double hf_energy(const HFCoherenceField& f, double k);

}  // namespace polx
