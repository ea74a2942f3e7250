#include "polx/kernel.hpp"

#include <algorithm>
#include <cmath>

#include <gsl/gsl_spline.h>

#include "polx/geometry.hpp"
#include "polx/quadrature.hpp"

namespace polx {

KernelQuadrature KernelQuadrature::refined() const {
  KernelQuadrature r = *this;
  r.n_phi *= 2;
  r.n_window *= 2;
  r.n_middle *= 2;
  r.n_outer *= 2;
  return r;
}

namespace {

// Past this q_t^2 every Gaussian factor is below 1e-32 of its peak.
constexpr double kQt2Skip = 150.0;

// Visits the cap nodes: f(kappa', beta', weight) with weight including the
// area element of d kappa'.
template <class F>
void cap_integrate(const SpectralMedium& m, const Vec2& kappa,
                   const KernelQuadrature& q, F&& f) {
  const Frame fr = frame_vectors(kappa);
  const double b = fr.kvec.z();
  const double n = kappa.norm();
  if (!(q.radius > n && q.radius <= 1.0))
    throw ValidationError("integration radius must exceed |kappa|");
  const double bmin = std::sqrt(std::max(0.0, 1.0 - q.radius * q.radius));
  const double scale = m.gamma() / m.k();
  const double th1_nom = q.window * scale;
  const double th2_nom = q.middle * scale / b;
  const Rule& gw = gauss_legendre_ref(q.n_window);
  const Rule& gm = gauss_legendre_ref(q.n_middle);
  const Rule& go = gauss_legendre_ref(q.n_outer);
  const double dphi = kTwoPi / q.n_phi;

  auto band = [&](const Rule& ref, double t0, double t1, const Vec3& dir) {
    const double c = 0.5 * (t0 + t1), h = 0.5 * (t1 - t0);
    for (size_t i = 0; i < ref.size(); ++i) {
      const double th = c + h * ref.x[i];
      const double st = std::sin(th), ct = std::cos(th);
      const Vec3 kp = ct * fr.kvec + st * dir;
      if (kp.z() <= 0.0) continue;
      f(Vec2(kp.x(), kp.y()), kp.z(), h * ref.w[i] * dphi * st * kp.z());
    }
  };

  for (int j = 0; j < q.n_phi; ++j) {
    const double phi = (j + 0.5) * dphi;
    const double cp = std::cos(phi), sp = std::sin(phi);
    const Vec3 dir = cp * fr.u + sp * fr.u_perp;
    const double A = std::hypot(b, n * cp);
    const double delta = std::atan2(n * cp, b);
    const double thmax = std::acos(std::min(1.0, bmin / A)) - delta;
    const double t1 = std::min(thmax, th1_nom);
    band(gw, 0.0, t1, dir);
    double t = t1;
    const double t2 = std::min(thmax, th2_nom);
    if (t2 > t) {
      band(gm, t, t2, dir);
      t = t2;
    }
    if (thmax > t) band(go, t, thmax, dir);
  }
}

struct GammaGT {
  double g00, g01, g11;
};

inline GammaGT ggt(const Vec2& k, double nk, double bk, const Vec2& kp,
                   double bkp) {
  const double nkp = kp.norm();
  const Mat2 g = gamma_aa_raw(k, nk, bk, kp, nkp, bkp);
  return {g(0, 0) * g(0, 0) + g(0, 1) * g(0, 1),
          g(0, 0) * g(1, 0) + g(0, 1) * g(1, 1),
          g(1, 0) * g(1, 0) + g(1, 1) * g(1, 1)};
}

double prefactor(const SpectralMedium& m) {
  const double k = m.k(), g = m.gamma(), a = m.alpha();
  return k * k * a * a / (4.0 * g * g * g) * k * k / (kTwoPi * kTwoPi);
}

}  // namespace

Mat2c q_matrix(const SpectralMedium& m, const Vec2& kappa,
               const KernelQuadrature& q) {
  const double n = kappa.norm();
  const double b = beta(kappa);
  const double kg = m.k() / m.gamma();
  const bool gaussian = m.model() != MediumModel::Tabulated;
  cplx s00 = 0.0, s01 = 0.0, s11 = 0.0;
  cap_integrate(m, kappa, q, [&](const Vec2& kp, double bp, double w) {
    const double dx = kg * (kappa.x() - kp.x()), dy = kg * (kappa.y() - kp.y());
    const double qt2 = dx * dx + dy * dy;
    if (gaussian && qt2 > kQt2Skip) return;
    if (kp.squaredNorm() == 0.0) return;
    const cplx d = w * m.dispersion_tz(qt2, kg * (b - bp));
    const GammaGT g = ggt(kappa, n, b, kp, bp);
    s00 += g.g00 * d;
    s01 += g.g01 * d;
    s11 += g.g11 * d;
  });
  const double p = -prefactor(m);
  Mat2c Q;
  Q(0, 0) = p * s00;
  Q(0, 1) = Q(1, 0) = p * s01;
  Q(1, 1) = p * s11;
  const double a = m.alpha();
  Q(0, 0) += cplx(0.0, -0.5 * m.k() * a * a * m.r0() * n * n / b);
  return Q;
}

Mat2 re_q_psd(const SpectralMedium& m, const Vec2& kappa,
              const KernelQuadrature& q) {
  const double n = kappa.norm();
  const double b = beta(kappa);
  const double kg = m.k() / m.gamma();
  const bool gaussian = m.model() != MediumModel::Tabulated;
  double s00 = 0.0, s01 = 0.0, s11 = 0.0;
  cap_integrate(m, kappa, q, [&](const Vec2& kp, double bp, double w) {
    const double dx = kg * (kappa.x() - kp.x()), dy = kg * (kappa.y() - kp.y());
    const double qt2 = dx * dx + dy * dy;
    if (gaussian && qt2 > kQt2Skip) return;
    if (kp.squaredNorm() == 0.0) return;
    const double r = w * m.psd3_tz(qt2, kg * (b - bp));
    const GammaGT g = ggt(kappa, n, b, kp, bp);
    s00 += g.g00 * r;
    s01 += g.g01 * r;
    s11 += g.g11 * r;
  });
  const double p = -0.5 * prefactor(m);
  Mat2 R;
  R << p * s00, p * s01, p * s01, p * s11;
  return R;
}

Mat2 s_from_q(const Mat2c& Q) {
  const Mat2c s = -Q - Q.adjoint();
  Mat2 S = s.real();
  S(0, 1) = S(1, 0) = 0.5 * (S(0, 1) + S(1, 0));
  return S;
}

namespace {
std::pair<double, double> sym_eig(const Mat2& S) {
  const double m = 0.5 * (S(0, 0) + S(1, 1));
  const double d = std::hypot(0.5 * (S(0, 0) - S(1, 1)), S(0, 1));
  return {m + d, m - d};
}
}  // namespace

Mat2 s_matrix(const SpectralMedium& m, const Vec2& kappa,
              const KernelQuadrature& q) {
  const Mat2 S = s_from_q(q_matrix(m, kappa, q));
  const auto [l1, l2] = sym_eig(S);
  if (l2 <= -1e-12 * (S(0, 0) + S(1, 1)) || l2 <= 0.0)
    throw NumericalError("loss matrix is not positive definite");
  (void)l1;
  return S;
}

MeanFreePaths mean_free_paths_from_q(const Mat2c& Q, double offdiag_tol) {
  if (std::abs(Q(0, 1)) > offdiag_tol * Q.norm() ||
      std::abs(Q(1, 0)) > offdiag_tol * Q.norm())
    throw NumericalError("kernel is not diagonal; mean free paths undefined");
  const double r1 = Q(0, 0).real(), r2 = Q(1, 1).real();
  if (!(r1 < 0.0 && r2 < 0.0))
    throw NumericalError("kernel real part is not negative");
  return {-1.0 / r1, -1.0 / r2};
}

MeanFreePaths mean_free_paths(const SpectralMedium& m, const Vec2& kappa,
                              const KernelQuadrature& q) {
  return mean_free_paths_from_q(q_matrix(m, kappa, q));
}

Mat2c expm2(const Mat2c& A) {
  const cplx mu = 0.5 * (A(0, 0) + A(1, 1));
  const Mat2c N = A - mu * Mat2c::Identity();
  // N^2 = d2 I
  const cplx d2 = N(0, 0) * N(0, 0) + N(0, 1) * N(1, 0);
  cplx ch, shc;  // cosh(d), sinh(d)/d
  if (std::abs(d2) < 1e-6) {
    ch = 1.0 + d2 / 2.0 + d2 * d2 / 24.0 + d2 * d2 * d2 / 720.0;
    shc = 1.0 + d2 / 6.0 + d2 * d2 / 120.0 + d2 * d2 * d2 / 5040.0;
  } else {
    const cplx d = std::sqrt(d2);
    ch = std::cosh(d);
    shc = std::sinh(d) / d;
  }
  return std::exp(mu) * (ch * Mat2c::Identity() + shc * N);
}

void finalize_kernel_field(ScatteringKernelField& f) {
  const size_t n = f.Q.size();
  f.S.resize(n);
  f.lambda1.resize(n);
  f.lambda2.resize(n);
  f.mfp_tm.resize(n);
  f.mfp_te.resize(n);
  for (size_t i = 0; i < n; ++i) {
    f.S[i] = s_from_q(f.Q[i]);
    const auto [l1, l2] = sym_eig(f.S[i]);
    f.lambda1[i] = l1;
    f.lambda2[i] = l2;
    f.mfp_tm[i] = -1.0 / f.Q[i](0, 0).real();
    f.mfp_te[i] = -1.0 / f.Q[i](1, 1).real();
  }
}

namespace {

template <class Body>
void for_nodes(Exec exec, long n, Body&& body) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) body(i);
  } else {
    for (long i = 0; i < n; ++i) body(i);
  }
}

struct Spline {
  gsl_spline* s = nullptr;
  explicit Spline(const std::vector<double>& x, const std::vector<double>& y) {
    s = gsl_spline_alloc(gsl_interp_cspline, x.size());
    gsl_spline_init(s, x.data(), y.data(), x.size());
  }
  ~Spline() { gsl_spline_free(s); }
  double operator()(double x) const { return gsl_spline_eval(s, x, nullptr); }
};

}  // namespace

ScatteringKernelField assemble_kernel_field(
    const SpectralMedium& m, std::shared_ptr<const DirectionGrid> grid,
    const KernelFieldOptions& opt) {
  ScatteringKernelField f;
  f.grid = grid;
  const DirectionGrid& g = *grid;
  f.Q.assign(g.size(), Mat2c::Zero());

  if (opt.reuse_rings && g.layout == GridLayout::PolarIsotropic) {
    const int nr = g.n_radial(), na = g.n_angular;
    std::vector<Mat2c> ring(nr);
    for_nodes(opt.exec, nr, [&](long i) {
      ring[i] = q_matrix(m, Vec2(g.radii[i], 0.0), opt.quad);
    });
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < na; ++j) f.Q[i * na + j] = ring[i];
  } else if (opt.radial_table > 0) {
    double rmin = 1.0, rmax = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
      rmin = std::min(rmin, g.radius(i));
      rmax = std::max(rmax, g.radius(i));
    }
    const int nt = std::max(opt.radial_table, 8);
    std::vector<double> r(nt);
    const double lo = 0.5 * rmin, hi = std::min(0.999, rmax + 0.5 * rmin);
    for (int i = 0; i < nt; ++i)
      r[i] = lo + (hi - lo) * 0.5 * (1.0 - std::cos(kPi * i / (nt - 1)));
    std::vector<Mat2c> tab(nt);
    for_nodes(opt.exec, nt, [&](long i) {
      tab[i] = q_matrix(m, Vec2(r[i], 0.0), opt.quad);
    });
    std::vector<double> c[4];
    for (auto& v : c) v.resize(nt);
    for (int i = 0; i < nt; ++i) {
      c[0][i] = tab[i](0, 0).real();
      c[1][i] = tab[i](0, 0).imag();
      c[2][i] = tab[i](1, 1).real();
      c[3][i] = tab[i](1, 1).imag();
    }
    const Spline s0(r, c[0]), s1(r, c[1]), s2(r, c[2]), s3(r, c[3]);
    for (size_t i = 0; i < g.size(); ++i) {
      const double ri = g.radius(i);
      f.Q[i](0, 0) = cplx(s0(ri), s1(ri));
      f.Q[i](1, 1) = cplx(s2(ri), s3(ri));
    }
  } else {
    for_nodes(opt.exec, static_cast<long>(g.size()), [&](long i) {
      f.Q[i] = q_matrix(m, g.nodes[i], opt.quad);
    });
  }
  finalize_kernel_field(f);
  return f;
}

std::vector<Vec2c> mean_amplitude(const ScatteringKernelField& f,
                                  const std::vector<Vec2c>& a0, double z) {
  if (a0.size() != f.size()) throw ValidationError("amplitude/grid mismatch");
  if (z < 0.0) throw ValidationError("z must be nonnegative");
  std::vector<Vec2c> out(a0.size());
  for (size_t i = 0; i < a0.size(); ++i) out[i] = expm2(f.Q[i] * z) * a0[i];
  return out;
}

std::pair<double, double> gronwall_bounds(const ScatteringKernelField& f,
                                          size_t node, double z) {
  return {std::exp(-0.5 * f.lambda1[node] * z),
          std::exp(-0.5 * f.lambda2[node] * z)};
}

}  // namespace polx
