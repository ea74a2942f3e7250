#pragma once

#include <array>
#include <memory>
#include <vector>

#include "polx/grid.hpp"
#include "polx/kernel.hpp"
#include "polx/medium.hpp"

namespace polx {

struct CoherenceField {
  std::shared_ptr<const DirectionGrid> grid;
  std::vector<Mat2c> P;
  double z = 0.0;
};

struct StokesState {
  std::vector<double> s1, s2, s3, s4, pol;
};

/// Hermitian 2x2 matrix stored as (P11, P22, Re P12, Im P12).
struct H2 {
  double p = 0.0, q = 0.0, cr = 0.0, ci = 0.0;
  Mat2c mat() const {
    Mat2c m;
    m << p, cplx(cr, ci), cplx(cr, -ci), q;
    return m;
  }
  static H2 from(const Mat2c& m) {
    return {m(0, 0).real(), m(1, 1).real(),
            0.5 * (m(0, 1).real() + m(1, 0).real()),
            0.5 * (m(0, 1).imag() - m(1, 0).imag())};
  }
  double trace() const { return p + q; }
  double min_eig() const {
    return 0.5 * (p + q) - std::hypot(0.5 * (p - q), std::hypot(cr, ci));
  }
};

struct TransportOptions {
  /// Pairs farther apart than this many gamma/k in transverse distance are
  /// dropped (Gaussian media).
  double cutoff_sigma = 7.0;
  /// Ring-reduced operator on polar grids (transverse-isotropic medium and
  /// rotation-invariant data).
  bool reduced = true;
  int psi_window_nodes = 32;
  int psi_outer_nodes = 32;
  double psi_window = 8.0;
  /// Leave out the j = i term of the gain (and the matching loss).
  bool exclude_self = false;
  Exec exec = Exec::Parallel;
};

/// Discretized right-hand side of the coherence transport equation. The
/// loss uses the same discrete gain weights, so total energy is conserved by
/// the discrete system; the dispersive part of Q comes from the kernel.
class TransportOperator {
 public:
  TransportOperator(const SpectralMedium& m, const ScatteringKernelField& kf,
                    const TransportOptions& opt = {});

  bool reduced() const { return reduced_; }
  size_t state_size() const { return w_.size(); }
  /// Energy weights of the state entries (integrate d kappa).
  const std::vector<double>& weights() const { return w_; }
  /// Loss matrix actually used per state entry.
  const std::vector<Mat2c>& q_used() const { return q_; }
  std::shared_ptr<const DirectionGrid> grid() const { return grid_; }
  double k() const { return k_; }

  void apply(const std::vector<H2>& P, std::vector<H2>& out, Exec exec) const;
  void apply(const std::vector<H2>& P, std::vector<H2>& out) const {
    apply(P, out, exec_);
  }

  std::vector<H2> reduce(const CoherenceField& f) const;
  CoherenceField expand(const std::vector<H2>& s, double z) const;

  /// Number of stored couplings (sparse) or ring pairs (reduced).
  size_t n_couplings() const;

 private:
  void build_sparse(const SpectralMedium& m, const TransportOptions& opt);
  void build_rings(const SpectralMedium& m, const TransportOptions& opt);

  std::shared_ptr<const DirectionGrid> grid_;
  bool reduced_ = false;
  Exec exec_ = Exec::Parallel;
  double k_ = kTwoPi;
  std::vector<double> w_;
  std::vector<Mat2c> q_;
  // sparse rows
  std::vector<size_t> row_;
  std::vector<int> col_;
  std::vector<double> gain_;            // G_ij
  std::vector<std::array<double, 4>> g_;  // Gamma_ij
  // ring tensor, 6 coefficients per (i, j)
  std::vector<std::array<double, 6>> ring_;
};

/// RHS for a full field (spec-level entry point).
std::vector<Mat2c> scattering_rhs(const TransportOperator& op,
                                  const CoherenceField& P);

struct TrajectoryRow {
  double z, energy, min_eig, c_p, p12_ratio;
};

struct EvolveOptions {
  std::vector<double> snapshots;  // z values to record (within [0, z_end])
  double positivity_tol = 1e-6;
  double drift_tol = 1e-4;
  /// Entries with trace below this fraction of the maximum are excluded
  /// from the eigenvalue ratio (they sit below roundoff of the bulk).
  double tail_floor = 1e-12;
  int record_every = 1;
};

struct EvolveResult {
  CoherenceField final;
  std::vector<TrajectoryRow> trajectory;
  std::vector<CoherenceField> snapshots;
  double max_drift = 0.0;
  double worst_min_eig = 0.0;
  double max_p12_ratio = 0.0;
};

EvolveResult evolve(const TransportOperator& op, const CoherenceField& P0,
                    double z_end, double dz, const EvolveOptions& opt = {});

/// Default step: mfp_min / 200 over the grid.
double default_step(const ScatteringKernelField& kf, double fraction = 1.0 / 200);

double total_energy(const CoherenceField& P, double k = kTwoPi);
double total_energy(const std::vector<H2>& s, const std::vector<double>& w,
                    double k = kTwoPi);
StokesState stokes(const CoherenceField& P);
struct Stokes4 {
  double s1, s2, s3, s4, pol;
};
Stokes4 stokes(const Mat2c& P);
double power_coefficient(const CoherenceField& P);
double power_coefficient(const std::vector<H2>& s, const std::vector<double>& w);

struct SheetPoint {
  Vec2 position;
  Mat2c P;
};
SheetPoint wigner_sheet(const CoherenceField& P, const Vec2& kappa, double z);

/// Field initialized from a source on the grid nodes.
struct SourceSpec;
CoherenceField initial_field(std::shared_ptr<const DirectionGrid> grid,
                             const SourceSpec& src);

}  // namespace polx
