#pragma once

#include <memory>
#include <vector>

#include "polx/types.hpp"

namespace polx {

/// Table of a transversely isotropic autocorrelation R(r_t, r_z) on a
/// product grid. r_t >= 0, r_z >= 0, values row-major in r_z.
struct CorrelationTable {
  std::vector<double> rt;
  std::vector<double> rz;
  std::vector<double> values;  // values[i * rz.size() + j] = R(rt[i], rz[j])
};

class TabulatedSpectra;

enum class MediumModel { GaussianIsotropic, GaussianTransverse, Tabulated };

/// Statistics of the fluctuation nu and the scaling parameters. Lengths are
/// in units of the correlation length, so R(0) = 1 for the built-in models.
class SpectralMedium {
 public:
  static SpectralMedium gaussian(double alpha, double gamma, double gamma_j,
                                 double k = kTwoPi);
  /// Gaussian with correlation length ell_z along the axis; R only depends
  /// on |r_t| and |r_z|.
  static SpectralMedium gaussian_transverse(double alpha, double gamma,
                                            double gamma_j, double ell_z,
                                            double k = kTwoPi);
  static SpectralMedium tabulated(double alpha, double gamma, double gamma_j,
                                  const CorrelationTable& table,
                                  double k = kTwoPi);

  double autocorr(const Vec3& r) const;
  double psd3(const Vec3& q) const;
  double psd_partial(const Vec2& qt, double zeta) const;
  cplx dispersion_integral(const Vec2& qt, double b) const;

  // Same quantities through the transverse modulus; used in hot loops.
  double psd3_tz(double qt2, double qz) const;
  cplx dispersion_tz(double qt2, double b) const;

  /// int_{-inf}^{inf} R(s zeta e, zeta) dzeta for unit transverse e.
  double lag_integral(double s) const;
  /// int_0^inf R_iso(r) dr (fully isotropic models only).
  double iso_half_integral() const;
  /// Isotropic PSD as a function of |q| (fully isotropic models only).
  double psd_iso(double q) const;

  bool isotropic() const { return model_ == MediumModel::GaussianIsotropic; }
  MediumModel model() const { return model_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double gamma_j() const { return gamma_j_; }
  double k() const { return k_; }
  double ell_z() const { return ell_z_; }
  double r0() const;

  SpectralMedium with_gamma(double gamma) const;
  SpectralMedium with_alpha(double alpha) const;

 private:
  SpectralMedium() = default;
  void validate() const;

  MediumModel model_ = MediumModel::GaussianIsotropic;
  double alpha_ = 1.0;
  double gamma_ = kTwoPi / 50.0;
  double gamma_j_ = kTwoPi / 50.0;
  double k_ = kTwoPi;
  double ell_z_ = 1.0;
  std::shared_ptr<const TabulatedSpectra> tab_;
};

/// Reads "rt,rz,value" rows (header optional) into a product-grid table.
CorrelationTable read_correlation_table(const std::string& path);

}  // namespace polx
