#include "tabulated.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_interp2d.h>
#include <gsl/gsl_sf_bessel.h>

#include "polx/quadrature.hpp"

namespace polx {

namespace {
constexpr int kNq = 320;
constexpr double kQmaxCap = 24.0;

double min_spacing(const std::vector<double>& v) {
  double h = v.back() - v.front();
  for (size_t i = 1; i < v.size(); ++i) h = std::min(h, v[i] - v[i - 1]);
  return h;
}

struct WsDeleter {
  void operator()(gsl_integration_workspace* w) const {
    gsl_integration_workspace_free(w);
  }
};
}  // namespace

double TabulatedSpectra::Grid2::eval(double xv, double yv) const {
  if (xv < x.front() || xv > x.back() || yv < y.front() || yv > y.back())
    return 0.0;
  return gsl_interp2d_eval(interp, x.data(), y.data(), z.data(), xv, yv,
                           nullptr, nullptr);
}

void TabulatedSpectra::build(Grid2& g) {
  g.interp = gsl_interp2d_alloc(gsl_interp2d_bicubic, g.x.size(), g.y.size());
  gsl_interp2d_init(g.interp, g.x.data(), g.y.data(), g.z.data(), g.x.size(),
                    g.y.size());
}

TabulatedSpectra::TabulatedSpectra(const CorrelationTable& t) {
  gsl_set_error_handler_off();
  if (t.rt.front() != 0.0 || t.rz.front() != 0.0)
    throw ValidationError("correlation table must start at rt = rz = 0");
  rt_max_ = t.rt.back();
  rz_max_ = t.rz.back();
  r_.x = t.rz;
  r_.y = t.rt;
  r_.z = t.values;
  build(r_);

  // Hankel transform in r_t at every tabulated lag.
  const double qt_max = std::min(kQmaxCap, kPi / min_spacing(t.rt));
  const double qz_max = std::min(kQmaxCap, kPi / min_spacing(t.rz));
  std::vector<double> qt(kNq), qz(kNq);
  for (int i = 0; i < kNq; ++i) {
    qt[i] = qt_max * i / (kNq - 1);
    qz[i] = qz_max * i / (kNq - 1);
  }
  const Rule rr = composite_gauss_legendre(0.0, rt_max_, 96, 8);
  hat_.x = t.rz;
  hat_.y = qt;
  hat_.z.assign(qt.size() * t.rz.size(), 0.0);
  for (size_t i = 0; i < qt.size(); ++i)
    for (size_t j = 0; j < t.rz.size(); ++j) {
      double s = 0.0;
      for (size_t n = 0; n < rr.x.size(); ++n)
        s += rr.w[n] * rr.x[n] * gsl_sf_bessel_J0(qt[i] * rr.x[n]) *
             autocorr(rr.x[n], t.rz[j]);
      hat_.z[i * t.rz.size() + j] = kTwoPi * s;
    }
  build(hat_);

  // Cosine transform in the lag.
  const Rule rz = composite_gauss_legendre(0.0, rz_max_, 64, 8);
  tilde_.x = qz;
  tilde_.y = qt;
  tilde_.z.assign(qt.size() * qz.size(), 0.0);
  std::vector<double> hat_col(rz.x.size());
  for (size_t i = 0; i < qt.size(); ++i) {
    for (size_t n = 0; n < rz.x.size(); ++n)
      hat_col[n] = hat_.eval(rz.x[n], qt[i]);
    for (size_t j = 0; j < qz.size(); ++j) {
      double s = 0.0;
      for (size_t n = 0; n < rz.x.size(); ++n)
        s += rz.w[n] * hat_col[n] * std::cos(qz[j] * rz.x[n]);
      tilde_.z[i * qz.size() + j] = 2.0 * s;
    }
  }
  build(tilde_);
}

TabulatedSpectra::~TabulatedSpectra() {
  gsl_interp2d_free(r_.interp);
  gsl_interp2d_free(hat_.interp);
  gsl_interp2d_free(tilde_.interp);
}

double TabulatedSpectra::autocorr(double rt, double rz) const {
  return r_.eval(rz, rt);
}

double TabulatedSpectra::psd_partial(double qt, double zeta) const {
  return hat_.eval(zeta, qt);
}

double TabulatedSpectra::psd3(double qt, double qz) const {
  return tilde_.eval(qz, qt);
}

cplx TabulatedSpectra::dispersion(double qt, double b) const {
  if (qt > hat_.y.back()) return 0.0;
  struct Ctx {
    const TabulatedSpectra* self;
    double qt, b;
  } ctx{this, qt, b};
  std::unique_ptr<gsl_integration_workspace, WsDeleter> ws(
      gsl_integration_workspace_alloc(400));
  gsl_function f;
  f.params = &ctx;
  double re = 0, im = 0, err = 0;
  // Absolute floor relative to the spectrum peak, so near-zero values converge.
  const double abs_tol = 1e-12 * std::abs(hat_.z.front()) * rz_max_;
  f.function = [](double z, void* p) {
    auto* c = static_cast<Ctx*>(p);
    return c->self->psd_partial(c->qt, z) * std::cos(c->b * z);
  };
  int s1 = gsl_integration_qag(&f, 0.0, rz_max_, abs_tol, 1e-10, 400,
                               GSL_INTEG_GAUSS31, ws.get(), &re, &err);
  f.function = [](double z, void* p) {
    auto* c = static_cast<Ctx*>(p);
    return -c->self->psd_partial(c->qt, z) * std::sin(c->b * z);
  };
  int s2 = gsl_integration_qag(&f, 0.0, rz_max_, abs_tol, 1e-10, 400,
                               GSL_INTEG_GAUSS31, ws.get(), &im, &err);
  auto ok = [](int s) { return s == GSL_SUCCESS || s == GSL_EROUND; };
  if (!ok(s1) || !ok(s2))
    throw NumericalError("dispersion quadrature did not converge");
  return {re, im};
}

double TabulatedSpectra::lag_integral(double s) const {
  struct Ctx {
    const TabulatedSpectra* self;
    double s;
  } ctx{this, s};
  std::unique_ptr<gsl_integration_workspace, WsDeleter> ws(
      gsl_integration_workspace_alloc(400));
  gsl_function f;
  f.params = &ctx;
  f.function = [](double z, void* p) {
    auto* c = static_cast<Ctx*>(p);
    return c->self->autocorr(c->s * z, z);
  };
  double v = 0, err = 0;
  if (gsl_integration_qag(&f, 0.0, rz_max_, 1e-10, 0.0, 400, GSL_INTEG_GAUSS31,
                          ws.get(), &v, &err) != GSL_SUCCESS)
    throw NumericalError("lag integral did not converge");
  return 2.0 * v;
}

}  // namespace polx
