#include "polx/mcoracle.hpp"

#include <fftw3.h>
#include <omp.h>

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <functional>
#include <mutex>
#include <random>

#include "polx/geometry.hpp"
#include "polx/source.hpp"

namespace polx {
namespace {

std::mutex& fftw_planner_lock() {
  static std::mutex m;
  return m;
}

int positive_mod(int a, int n) { return ((a % n) + n) % n; }

int next_pow2(double x) {
  int n = 1;
  while (n < x) n *= 2;
  return n;
}

// Leave-one-out standard error of a statistic computed from the ensemble.
double jackknife_se(int n, const std::function<double(int)>& stat) {
  std::vector<double> t(n);
  double mean = 0.0;
  for (int r = 0; r < n; ++r) {
    t[r] = stat(r);
    mean += t[r];
  }
  mean /= n;
  double v = 0.0;
  for (double x : t) v += (x - mean) * (x - mean);
  return std::sqrt(v * (n - 1.0) / n);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

MCLattice make_mc_lattice(const SpectralMedium& m, const EnsembleConfig& c) {
  if (c.box <= 0 || c.lattice_radius <= 0)
    throw ValidationError("lattice box and radius must be positive");
  MCLattice lat;
  lat.dk = kTwoPi * m.gamma() / (m.k() * c.box);
  const int mr = static_cast<int>(std::ceil(c.lattice_radius)) + 1;
  for (int mx = -mr; mx < mr; ++mx)
    for (int my = -mr; my < mr; ++my) {
      const Vec2 kap((mx + 0.5) * lat.dk, (my + 0.5) * lat.dk);
      if (kap.norm() > c.lattice_radius * lat.dk) continue;
      if (kap.norm() >= 1.0) throw ValidationError("lattice leaves the propagating disk");
      lat.nodes.push_back(kap);
      lat.index.push_back({mx, my});
    }
  if (lat.nodes.empty()) throw ValidationError("empty lattice");
  return lat;
}

double MediumRealization::p(int n) const {
  const int sn = n < ns / 2 ? n : n - ns;
  return kTwoPi * sn / s_period;
}

double MediumRealization::value(const Vec3& r) const {
  cplx acc = 0.0;
  for (int mx = -mt; mx <= mt; ++mx)
    for (int my = -mt; my <= mt; ++my) {
      const double ph = q(mx) * r.x() + q(my) * r.y();
      for (int n = 0; n < ns; ++n) {
        const cplx cc = c(mx, my, n);
        if (cc == 0.0) continue;
        acc += cc * std::polar(1.0, ph + p(n) * r.z());
      }
    }
  return acc.real();
}

double MediumRealization::box_mean() const { return c(0, 0, 0).real(); }

double MediumRealization::box_autocorr(const Vec3& lag) const {
  double acc = 0.0;
  for (int mx = -mt; mx <= mt; ++mx)
    for (int my = -mt; my <= mt; ++my)
      for (int n = 0; n < ns; ++n) {
        const double a = std::norm(c(mx, my, n));
        if (a == 0.0) continue;
        acc += a * std::cos(q(mx) * lag.x() + q(my) * lag.y() + p(n) * lag.z());
      }
  return acc;
}

SGrid make_s_grid(const SpectralMedium& m, const EnsembleConfig& c, double dz,
                  double z_end) {
  SGrid g;
  g.ds = m.gamma() * dz / c.epsilon;
  const double need = m.gamma() * z_end / c.epsilon + c.s_margin;
  g.ns = next_pow2(need / g.ds);
  g.period = g.ns * g.ds;
  return g;
}

MediumRealization synthesize_medium(const SpectralMedium& m,
                                    const EnsembleConfig& c, const SGrid& sg,
                                    std::uint64_t realization_index) {
  MediumRealization nu;
  nu.box = c.box;
  nu.ns = sg.ns;
  nu.s_period = sg.period;
  nu.mt = static_cast<int>(std::ceil(c.mode_cutoff * c.box / kTwoPi));
  const int side = 2 * nu.mt + 1;
  nu.coef.assign(static_cast<size_t>(side) * side * nu.ns, 0.0);
  const int nmax = std::min(nu.ns / 2 - 1,
                            static_cast<int>(std::floor(c.mode_cutoff * sg.period / kTwoPi)));

  std::seed_seq seq{static_cast<std::uint32_t>(c.seed),
                    static_cast<std::uint32_t>(c.seed >> 32),
                    static_cast<std::uint32_t>(realization_index),
                    static_cast<std::uint32_t>(realization_index >> 32)};
  std::mt19937_64 eng(seq);
  boost::random::normal_distribution<double> normal;
  const double vol = c.box * c.box * sg.period;
  auto slot = [&](int mx, int my, int n) -> cplx& {
    return nu.coef[(static_cast<size_t>(mx + nu.mt) * side + (my + nu.mt)) * nu.ns +
                   positive_mod(n, nu.ns)];
  };
  // Draw one member of each conjugate pair in lexicographic order.
  for (int mx = 0; mx <= nu.mt; ++mx)
    for (int my = -nu.mt; my <= nu.mt; ++my) {
      if (mx == 0 && my < 0) continue;
      for (int n = -nmax; n <= nmax; ++n) {
        if (mx == 0 && my == 0 && n < 0) continue;
        const double qt2 = nu.q(mx) * nu.q(mx) + nu.q(my) * nu.q(my);
        const double pn = kTwoPi * n / sg.period;
        const double var = m.psd3_tz(qt2, pn) / vol;
        if (mx == 0 && my == 0 && n == 0) {
          slot(0, 0, 0) = std::sqrt(var) * normal(eng);
          continue;
        }
        const double sd = std::sqrt(0.5 * var);
        const double re = normal(eng), im = normal(eng);
        const cplx v(sd * re, sd * im);
        slot(mx, my, n) = v;
        slot(-mx, -my, -n) = std::conj(v);
      }
    }
  return nu;
}

std::vector<Mat2c> lattice_q(const SpectralMedium& m, const MCLattice& lat) {
  const double k = m.k(), g = m.gamma(), a = m.alpha();
  const double kg = k / g;
  const double pref = k * k * a * a / (4.0 * g * g * g) * k * k / (kTwoPi * kTwoPi);
  const size_t n = lat.size();
  std::vector<Mat2c> Q(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2& ki = lat.nodes[i];
    const double ni = ki.norm(), bi = beta(ki);
    Mat2c acc = Mat2c::Zero();
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec2& kj = lat.nodes[j];
      const double qt2 = kg * kg * (ki - kj).squaredNorm();
      const cplx d = m.dispersion_tz(qt2, kg * (bi - beta(kj)));
      const Mat2 G = gamma_aa_raw(ki, ni, bi, kj, kj.norm(), beta(kj));
      acc += d * (G * G.transpose()).cast<cplx>();
    }
    Q[i] = -pref * lat.weight() * acc;
    Q[i](0, 0) += cplx(0.0, -0.5 * k * a * a * m.r0() * ni * ni / bi);
  }
  return Q;
}

AmplitudeTrajectory integrate_amplitudes(const SpectralMedium& m,
                                         const MediumRealization& nu,
                                         const EnsembleConfig& c,
                                         const MCLattice& lat,
                                         const std::vector<Vec2c>& a0,
                                         double dz, double z_end,
                                         bool zero_medium) {
  const int n = static_cast<int>(lat.size());
  if (static_cast<int>(a0.size()) != n) throw ValidationError("a0 size mismatch");
  const int nsteps = static_cast<int>(std::lround(z_end / dz));
  if (nsteps < 1) throw ValidationError("z_end shorter than one step");
  if (nsteps > nu.ns) throw ValidationError("medium realization too short for the run");
  const int every = std::max(1, nsteps / std::max(1, c.n_records));
  const double k = m.k(), eps = c.epsilon, alpha = m.alpha();
  const int mt = nu.mt, side = 2 * mt + 1, ns = nu.ns;

  // Largest index difference on the lattice.
  int dmax = 0;
  for (auto& a : lat.index)
    for (auto& b : lat.index)
      dmax = std::max({dmax, std::abs(a[0] - b[0]), std::abs(a[1] - b[1])});
  if (dmax > mt) throw ValidationError("mode cutoff smaller than the lattice span");
  const int dside = 2 * dmax + 1;

  // nu_m(s_t) at step midpoints for every transverse mode.
  std::vector<cplx> tab(static_cast<size_t>(side) * side * ns);
  const double ds = nu.s_period / ns;
  for (int b = 0; b < side * side; ++b)
    for (int t = 0; t < ns; ++t)
      tab[static_cast<size_t>(b) * ns + t] =
          nu.coef[static_cast<size_t>(b) * ns + t] * std::polar(1.0, 0.5 * nu.p(t) * ds);
  const int gsz = next_pow2(2 * mt + dmax + 1);
  fftw_plan p1d, pf, pb;
  std::vector<cplx> work(static_cast<size_t>(gsz) * gsz);
  {
    std::lock_guard<std::mutex> lk(fftw_planner_lock());
    p1d = fftw_plan_many_dft(1, &ns, side * side,
                             reinterpret_cast<fftw_complex*>(tab.data()), nullptr, 1, ns,
                             reinterpret_cast<fftw_complex*>(tab.data()), nullptr, 1, ns,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
    pb = fftw_plan_dft_2d(gsz, gsz, reinterpret_cast<fftw_complex*>(work.data()),
                          reinterpret_cast<fftw_complex*>(work.data()), FFTW_BACKWARD,
                          FFTW_ESTIMATE);
    pf = fftw_plan_dft_2d(gsz, gsz, reinterpret_cast<fftw_complex*>(work.data()),
                          reinterpret_cast<fftw_complex*>(work.data()), FFTW_FORWARD,
                          FFTW_ESTIMATE);
  }
  fftw_execute(p1d);
  auto nu_at = [&](int dx, int dy, int t) {
    return tab[(static_cast<size_t>(dx + mt) * side + (dy + mt)) * ns + t];
  };

  std::vector<double> b(n), nr(n);
  for (int i = 0; i < n; ++i) {
    b[i] = beta(lat.nodes[i]);
    nr[i] = lat.nodes[i].norm();
  }
  std::vector<Mat2> gam(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      gam[static_cast<size_t>(i) * n + j] =
          gamma_aa_raw(lat.nodes[i], nr[i], b[i], lat.nodes[j], nr[j], b[j]);

  const cplx cf(0.0, k * alpha / (2.0 * std::sqrt(eps)));
  const cplx cg(0.0, 0.5 * k * alpha * alpha);
  const int dim = 2 * n;
  Eigen::VectorXcd a(dim), rhs(dim), x(dim), xn(dim);
  for (int i = 0; i < n; ++i) a.segment<2>(2 * i) = a0[i];
  Eigen::MatrixXcd A(dim, dim);
  std::vector<cplx> nu2(static_cast<size_t>(dside) * dside);

  AmplitudeTrajectory out;
  const double e0 = a.squaredNorm();
  double e_prev = e0;
  auto record = [&](double z) {
    out.z.push_back(z);
    std::vector<Vec2c> row(n);
    for (int i = 0; i < n; ++i) row[i] = a.segment<2>(2 * i);
    out.a.push_back(std::move(row));
  };
  record(0.0);

  for (int t = 0; t < nsteps; ++t) {
    if (!zero_medium) {
      const double zm = (t + 0.5) * dz;
      // nu^2 modes by squaring on a dealiased transverse grid.
      std::fill(work.begin(), work.end(), 0.0);
      for (int mx = -mt; mx <= mt; ++mx)
        for (int my = -mt; my <= mt; ++my)
          work[static_cast<size_t>(positive_mod(mx, gsz)) * gsz + positive_mod(my, gsz)] =
              nu_at(mx, my, t);
      fftw_execute(pb);
      for (auto& v : work) v = v.real() * v.real();
      fftw_execute(pf);
      const double inv = 1.0 / (static_cast<double>(gsz) * gsz);
      for (int dx = -dmax; dx <= dmax; ++dx)
        for (int dy = -dmax; dy <= dmax; ++dy)
          nu2[static_cast<size_t>(dx + dmax) * dside + (dy + dmax)] =
              inv * work[static_cast<size_t>(positive_mod(dx, gsz)) * gsz +
                         positive_mod(dy, gsz)];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const int dx = lat.index[i][0] - lat.index[j][0];
          const int dy = lat.index[i][1] - lat.index[j][1];
          const cplx ph = std::polar(1.0, k * (b[j] - b[i]) * zm / eps);
          Mat2c blk = Mat2c::Zero();
          if (i != j)
            blk = (cf * nu_at(dx, dy, t) * ph) *
                  gam[static_cast<size_t>(i) * n + j].cast<cplx>();
          blk(0, 0) += cg * nu2[static_cast<size_t>(dx + dmax) * dside + (dy + dmax)] * ph *
                       (-nr[i] * nr[j] / std::sqrt(b[i] * b[j]));
          A.block<2, 2>(2 * i, 2 * j) = blk;
        }
      // Cayley step, solved by fixed-point iteration.
      const double h = 0.5 * dz;
      rhs = a + h * (A * a);
      x = rhs;
      bool conv = false;
      const double scale = std::max(1e-300, rhs.norm());
      for (int it = 0; it < 60; ++it) {
        xn = rhs + h * (A * x);
        const double d = (xn - x).norm();
        x.swap(xn);
        if (d <= c.fixed_point_tol * scale) {
          conv = true;
          break;
        }
      }
      if (!conv) {
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(dim, dim) - h * A;
        x = M.partialPivLu().solve(rhs);
      }
      a = x;
    }
    const double e1 = a.squaredNorm();
    if (std::abs(e1 - e_prev) > 1e-6 * e_prev)
      throw NumericalError("amplitude step changed the energy by more than 1e-6; reduce dz");
    e_prev = e1;
    out.max_drift = std::max(out.max_drift, std::abs(e1 - e0) / e0);
    if ((t + 1) % every == 0 || t + 1 == nsteps) record((t + 1) * dz);
  }
  {
    std::lock_guard<std::mutex> lk(fftw_planner_lock());
    fftw_destroy_plan(p1d);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(pf);
  }
  return out;
}

EnsembleMoments ensemble_moments(const SpectralMedium& m,
                                 const EnsembleConfig& c, const MCLattice& lat,
                                 const std::vector<Vec2c>& a0, double dz,
                                 double z_end) {
  if (c.n_realizations < 2) throw ValidationError("need at least two realizations");
  if (!(c.epsilon > 0.0 && c.epsilon <= 0.1 * m.gamma()))
    throw ValidationError("epsilon must lie in (0, gamma/10]");
  const SGrid sg = make_s_grid(m, c, dz, z_end);
  EnsembleMoments em;
  em.samples.resize(c.n_realizations);
  std::vector<double> drift(c.n_realizations);
  std::vector<double> zs;
  const int nthreads = c.exec == Exec::Serial ? 1 : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (int r = 0; r < c.n_realizations; ++r) {
    const MediumRealization nu = synthesize_medium(m, c, sg, static_cast<std::uint64_t>(r));
    AmplitudeTrajectory tr = integrate_amplitudes(m, nu, c, lat, a0, dz, z_end);
    drift[r] = tr.max_drift;
    em.samples[r] = std::move(tr.a);
    if (r == 0) {
#pragma omp critical
      zs = tr.z;
    }
  }
  em.z = zs;
  const size_t nrec = em.z.size(), n = lat.size();
  const double inv = 1.0 / c.n_realizations;
  em.mean.assign(nrec, std::vector<Vec2c>(n, Vec2c::Zero()));
  em.coherence.assign(nrec, std::vector<H2>(n));
  for (int r = 0; r < c.n_realizations; ++r) {
    em.max_drift = std::max(em.max_drift, drift[r]);
    for (size_t t = 0; t < nrec; ++t)
      for (size_t i = 0; i < n; ++i) {
        const Vec2c& v = em.samples[r][t][i];
        em.mean[t][i] += inv * v;
        H2& h = em.coherence[t][i];
        const cplx x12 = v(0) * std::conj(v(1));
        h.p += inv * std::norm(v(0));
        h.q += inv * std::norm(v(1));
        h.cr += inv * x12.real();
        h.ci += inv * x12.imag();
      }
  }
  return em;
}

MCReport mc_verify(const SpectralMedium& m, const EnsembleConfig& c) {
  if (!(c.epsilon > 0.0 && c.epsilon <= 0.1 * m.gamma()))
    throw ValidationError("epsilon must lie in (0, gamma/10]");
  const MCLattice lat = make_mc_lattice(m, c);
  const size_t n = lat.size();
  const std::vector<Mat2c> Q = lattice_q(m, lat);
  double mfp = 0.0;
  for (auto& q : Q) mfp += -1.0 / q(0, 0).real();
  mfp /= n;

  MCReport rep{};
  rep.epsilon = c.epsilon;
  rep.gamma = m.gamma();
  rep.alpha = m.alpha();
  rep.n_realizations = c.n_realizations;
  rep.n_nodes = static_cast<int>(n);
  rep.z_end = c.z_end > 0 ? c.z_end : 2.0 * mfp;
  rep.z_fit = c.z_fit > 0 ? c.z_fit : mfp;  // reported; fits use per-node values
  const double dz0 = c.dz > 0 ? c.dz : c.epsilon / (20.0 * m.gamma());
  const int nrec = std::max(1, c.n_records);
  int nsteps = static_cast<int>(std::ceil(rep.z_end / dz0 / nrec)) * nrec;
  rep.dz = rep.z_end / nsteps;

  SourceSpec src;
  src.gamma_j = m.gamma_j();
  src.k = m.k();
  std::vector<Vec2c> a0(n);
  for (size_t i = 0; i < n; ++i) {
    const InitialAmplitudes ia = initial_amplitudes(src, lat.nodes[i]);
    a0[i] = Vec2c(ia.a, ia.a_perp);
  }

  const EnsembleMoments em = ensemble_moments(m, c, lat, a0, rep.dz, rep.z_end);
  rep.max_drift = em.max_drift;
  rep.drift_ok = em.max_drift < 1e-5;
  rep.z = em.z;
  const int N = c.n_realizations;
  const size_t nz = em.z.size();

  // Leave-one-out mean of the TM amplitude.
  auto mean_wo = [&](int r, size_t t, size_t i) -> cplx {
    if (r < 0) return em.mean[t][i](0);
    return (em.mean[t][i](0) * static_cast<double>(N) - em.samples[r][t][i](0)) /
           static_cast<double>(N - 1);
  };

  rep.abs_mean.assign(n, std::vector<double>(nz));
  rep.abs_se.assign(n, std::vector<double>(nz));
  rep.abs_pred.assign(n, std::vector<double>(nz));
  rep.decay_ok = true;
  for (size_t i = 0; i < n; ++i) {
    // Fit window: one mean free path of this node unless set explicitly.
    const double zf = c.z_fit > 0 ? c.z_fit : -1.0 / Q[i](0, 0).real();
    std::vector<size_t> fit_idx;
    std::vector<double> xs;
    for (size_t t = 0; t < nz; ++t)
      if (em.z[t] <= zf * (1 + 1e-12)) {
        fit_idx.push_back(t);
        xs.push_back(em.z[t]);
      }
    if (fit_idx.size() < 3) throw ValidationError("decay fit window has fewer than 3 records");
    for (size_t t = 0; t < nz; ++t) {
      rep.abs_mean[i][t] = std::abs(em.mean[t][i](0));
      rep.abs_se[i][t] =
          jackknife_se(N, [&](int r) { return std::abs(mean_wo(r, t, i)); });
      const Vec2c pa = expm2(Q[i] * em.z[t]) * a0[i];
      rep.abs_pred[i][t] = std::abs(pa(0));
    }
    auto rate_from = [&](int r) {
      std::vector<double> ys;
      for (size_t t : fit_idx) ys.push_back(std::log(std::abs(mean_wo(r, t, i))));
      return -fit_slope(xs, ys);
    };
    std::vector<double> yp;
    for (size_t t : fit_idx) yp.push_back(std::log(rep.abs_pred[i][t]));
    NodeDecay d{static_cast<int>(i), rate_from(-1), jackknife_se(N, rate_from),
                -fit_slope(xs, yp), -Q[i](0, 0).real()};
    if (std::abs(d.rate_mc - d.rate_pred) > 3.0 * d.rate_se) rep.decay_ok = false;
    rep.decay.push_back(d);
  }

  // Transport on the same lattice.
  {
    std::vector<double> w(n, lat.weight());
    double rmax = 0.0;
    for (auto& v : lat.nodes) rmax = std::max(rmax, v.norm());
    auto grid = std::make_shared<const DirectionGrid>(
        DirectionGrid::general(lat.nodes, w, std::min(0.999, rmax + lat.dk)));
    ScatteringKernelField kf;
    kf.grid = grid;
    kf.Q = Q;
    finalize_kernel_field(kf);
    TransportOptions topt;
    topt.reduced = false;
    topt.exclude_self = true;
    topt.cutoff_sigma = 1e3;
    topt.exec = c.exec;
    TransportOperator op(m, kf, topt);
    CoherenceField P0{grid, std::vector<Mat2c>(n), 0.0};
    for (size_t i = 0; i < n; ++i) P0.P[i] = a0[i] * a0[i].adjoint();
    EvolveOptions eo;
    eo.snapshots.assign(em.z.begin() + 1, em.z.end());
    const EvolveResult er = evolve(op, P0, em.z.back(), rep.dz, eo);
    if (er.snapshots.size() != nz - 1)
      throw NumericalError("transport snapshots do not match the ensemble records");
    double e11 = 0, n11 = 0, e22 = 0, n22 = 0;
    for (size_t t = 1; t < nz; ++t) {
      const CoherenceField& s = er.snapshots[t - 1];
      for (size_t i = 0; i < n; ++i) {
        const double p11 = s.P[i](0, 0).real(), p22 = s.P[i](1, 1).real();
        e11 += std::pow(em.coherence[t][i].p - p11, 2);
        n11 += p11 * p11;
        e22 += std::pow(em.coherence[t][i].q - p22, 2);
        n22 += p22 * p22;
      }
    }
    rep.l2_p11 = std::sqrt(e11 / n11);
    rep.l2_p22 = std::sqrt(e22 / std::max(n22, 1e-300));
    rep.coherence_ok = rep.l2_p11 < 0.15 && rep.l2_p22 < 0.15;
  }

  // Cross-wave-vector decorrelation at z_end for pairs without resonant
  // partners: no other pair with the same index difference and a matching
  // beta difference.
  {
    const double tol = 1e-2;
    std::vector<double> b(n);
    for (size_t i = 0; i < n; ++i) b[i] = beta(lat.nodes[i]);
    struct Cand {
      size_t i, j;
      double gap;
    };
    std::vector<Cand> cands;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j) {
        double gap = 1e9;
        for (size_t k = 0; k < n; ++k)
          for (size_t l = 0; l < n; ++l) {
            if (k == l || (k == i && l == j)) continue;
            if (lat.index[k][0] - lat.index[l][0] != lat.index[i][0] - lat.index[j][0] ||
                lat.index[k][1] - lat.index[l][1] != lat.index[i][1] - lat.index[j][1])
              continue;
            gap = std::min(gap, std::abs((b[k] - b[l]) - (b[i] - b[j])));
          }
        if (gap > tol) cands.push_back({i, j, gap});
      }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& x, const Cand& y) { return x.gap > y.gap; });
    if (cands.size() > 8) cands.resize(8);
    const size_t t = nz - 1;
    rep.decorrelation_ok = !cands.empty();
    for (const Cand& cd : cands) {
      auto stat = [&](int r) -> cplx {
        cplx s = 0.0;
        for (int q = 0; q < N; ++q) {
          if (q == r) continue;
          s += em.samples[q][t][cd.i](0) * std::conj(em.samples[q][t][cd.j](0));
        }
        s /= static_cast<double>(r < 0 ? N : N - 1);
        return s - mean_wo(r, t, cd.i) * std::conj(mean_wo(r, t, cd.j));
      };
      PairCorrelation pc{static_cast<int>(cd.i), static_cast<int>(cd.j), stat(-1),
                         jackknife_se(N, [&](int r) { return stat(r).real(); }),
                         jackknife_se(N, [&](int r) { return stat(r).imag(); })};
      if (std::abs(pc.value.real()) > 3 * pc.se_re || std::abs(pc.value.imag()) > 3 * pc.se_im)
        rep.decorrelation_ok = false;
      rep.pairs.push_back(pc);
    }
  }
  return rep;
}

}  // namespace polx
