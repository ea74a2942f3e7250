#pragma once

#include <vector>

#include "polx/medium.hpp"

#include <gsl/gsl_interp2d.h>

namespace polx {

// Spectra of a tabulated transversely isotropic correlation. Transforms are
// precomputed on grids at construction and interpolated bicubically.
class TabulatedSpectra {
 public:
  explicit TabulatedSpectra(const CorrelationTable& table);
  ~TabulatedSpectra();
  TabulatedSpectra(const TabulatedSpectra&) = delete;
  TabulatedSpectra& operator=(const TabulatedSpectra&) = delete;

  double autocorr(double rt, double rz) const;
  double psd_partial(double qt, double zeta) const;
  double psd3(double qt, double qz) const;
  cplx dispersion(double qt, double b) const;
  double lag_integral(double s) const;

 private:
  struct Grid2 {
    std::vector<double> x, y, z;
    gsl_interp2d* interp = nullptr;
    double eval(double xv, double yv) const;
  };
  static void build(Grid2& g);

  Grid2 r_;       // x = rz, y = rt
  Grid2 hat_;     // x = zeta, y = qt
  Grid2 tilde_;   // x = qz, y = qt
  double rt_max_, rz_max_;
};

}  // namespace polx
