#pragma once

#include <cstdint>
#include <vector>

#include "polx/grid.hpp"
#include "polx/kernel.hpp"
#include "polx/medium.hpp"
#include "polx/transport.hpp"

namespace polx {

struct EnsembleConfig {
  double epsilon = 1e-3;
  double dz = 0.0;          // 0: epsilon / (20 gamma)
  double z_end = 0.0;       // 0: two mean free paths of the innermost node
  double z_fit = 0.0;       // 0: one mean free path
  int n_realizations = 400;
  std::uint64_t seed = 20240611;
  double box = 8.0;            // transverse period, correlation lengths
  double lattice_radius = 2.6; // in lattice spacings
  double mode_cutoff = 6.5;    // |q| beyond which spectral content is dropped
  double s_margin = 12.0;      // extra longitudinal period beyond the run
  int n_records = 40;
  double fixed_point_tol = 1e-15;
  Exec exec = Exec::Parallel;
};

/// Shifted square lattice kappa = (m + 1/2) dk with dk = 2 pi gamma / (k box);
/// wave-vector differences are then exactly the box Fourier modes.
struct MCLattice {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 2>> index;  // m such that kappa = (m + 1/2) dk
  double dk = 0.0;
  double weight() const { return dk * dk; }
  size_t size() const { return nodes.size(); }
};

MCLattice make_mc_lattice(const SpectralMedium& m, const EnsembleConfig& c);

/// One realization of nu on the periodic box: Fourier coefficients
/// c(m, n) for transverse modes |m_x|, |m_y| <= mt and longitudinal modes
/// stored in FFT order.
struct MediumRealization {
  int mt = 0;
  int ns = 0;
  double box = 0.0;
  double s_period = 0.0;
  std::vector<cplx> coef;  // [(mx + mt) * (2 mt + 1) + (my + mt)] * ns + n
  double q(int m) const { return kTwoPi * m / box; }
  double p(int n) const;  // signed longitudinal wavenumber of FFT slot n
  cplx c(int mx, int my, int n) const {
    return coef[(static_cast<size_t>(mx + mt) * (2 * mt + 1) + (my + mt)) * ns + n];
  }
  /// Direct trigonometric evaluation of nu at (x, y, s).
  double value(const Vec3& r) const;
  /// Box average of nu.
  double box_mean() const;
  /// Box average of nu(r) nu(r + lag), exact for the periodic field.
  double box_autocorr(const Vec3& lag) const;
};

/// Longitudinal grid used for the run: spacing, slot count and period.
struct SGrid {
  double ds;
  int ns;
  double period;
};
SGrid make_s_grid(const SpectralMedium& m, const EnsembleConfig& c,
                  double dz, double z_end);

MediumRealization synthesize_medium(const SpectralMedium& m,
                                    const EnsembleConfig& c, const SGrid& sg,
                                    std::uint64_t realization_index);

struct AmplitudeTrajectory {
  std::vector<double> z;
  std::vector<std::vector<Vec2c>> a;  // [record][node]
  double max_drift = 0.0;
};

/// Midpoint (Cayley) integration of the forward amplitude system on the
/// lattice. The j = i term of the O(eps^-1/2) coupling is left out.
AmplitudeTrajectory integrate_amplitudes(const SpectralMedium& m,
                                         const MediumRealization& nu,
                                         const EnsembleConfig& c,
                                         const MCLattice& lat,
                                         const std::vector<Vec2c>& a0,
                                         double dz, double z_end,
                                         bool zero_medium = false);

/// Markov-limit kernel on the lattice (sum over j != i).
std::vector<Mat2c> lattice_q(const SpectralMedium& m, const MCLattice& lat);

struct EnsembleMoments {
  std::vector<double> z;
  std::vector<std::vector<Vec2c>> mean;      // [record][node]
  std::vector<std::vector<H2>> coherence;    // [record][node]
  std::vector<std::vector<std::vector<Vec2c>>> samples;  // [realization][record][node]
  double max_drift = 0.0;
};

EnsembleMoments ensemble_moments(const SpectralMedium& m,
                                 const EnsembleConfig& c, const MCLattice& lat,
                                 const std::vector<Vec2c>& a0, double dz,
                                 double z_end);

struct NodeDecay {
  int node;
  double rate_mc, rate_se, rate_pred, re_q11;
};
struct PairCorrelation {
  int i, j;
  cplx value;
  double se_re, se_im;
};

struct MCReport {
  double epsilon, gamma, alpha, dz, z_end, z_fit;
  int n_realizations, n_nodes;
  double max_drift;
  std::vector<NodeDecay> decay;
  double l2_p11, l2_p22;
  std::vector<PairCorrelation> pairs;
  bool drift_ok, decay_ok, coherence_ok, decorrelation_ok;
  // Data for output: z, per node |mean a|, its standard error, prediction.
  std::vector<double> z;
  std::vector<std::vector<double>> abs_mean, abs_se, abs_pred;
  bool ok() const { return drift_ok && decay_ok && coherence_ok && decorrelation_ok; }
};

/// Runs the ensemble and compares with the kernel and transport predictions.
MCReport mc_verify(const SpectralMedium& m, const EnsembleConfig& c);

}  // namespace polx
