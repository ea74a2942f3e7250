#include "polx/transport.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "polx/geometry.hpp"
#include "polx/quadrature.hpp"
#include "polx/source.hpp"

namespace polx {

namespace {

double gain_prefactor(const SpectralMedium& m) {
  const double k = m.k(), g = m.gamma(), a = m.alpha();
  return k * k * a * a / (4.0 * g * g * g) * k * k / (kTwoPi * kTwoPi);
}

template <class Body>
void for_rows(Exec exec, long n, Body&& body) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) body(i);
  } else {
    for (long i = 0; i < n; ++i) body(i);
  }
}

// Q P + P Q^dagger for Hermitian P.
inline H2 loss_term(const Mat2c& Q, const H2& s) {
  const Mat2c P = s.mat();
  return H2::from(Q * P + P * Q.adjoint());
}

}  // namespace

TransportOperator::TransportOperator(const SpectralMedium& m,
                                     const ScatteringKernelField& kf,
                                     const TransportOptions& opt)
    : grid_(kf.grid), exec_(opt.exec), k_(m.k()) {
  if (!grid_) throw ValidationError("kernel field has no grid");
  reduced_ = opt.reduced && grid_->layout == GridLayout::PolarIsotropic &&
             m.model() != MediumModel::Tabulated;
  if (reduced_)
    build_rings(m, opt);
  else
    build_sparse(m, opt);
  // Dispersive part from the kernel.
  if (reduced_) {
    const int na = grid_->n_angular;
    for (size_t i = 0; i < q_.size(); ++i)
      q_[i] += cplx(0.0, 1.0) * kf.Q[i * na].imag();
  } else {
    for (size_t i = 0; i < q_.size(); ++i)
      q_[i] += cplx(0.0, 1.0) * kf.Q[i].imag();
  }
}

void TransportOperator::build_sparse(const SpectralMedium& m,
                                     const TransportOptions& opt) {
  const DirectionGrid& g = *grid_;
  const size_t n = g.size();
  const double kg = m.k() / m.gamma();
  const double cut = opt.cutoff_sigma / kg;
  const double pref = gain_prefactor(m);
  w_ = g.weights;
  std::vector<double> b(n), nr(n);
  for (size_t i = 0; i < n; ++i) {
    b[i] = beta(g.nodes[i]);
    nr[i] = g.nodes[i].norm();
  }
  // Bucket the nodes by cells of side `cut`.
  auto cell_of = [&](const Vec2& p) {
    return std::pair<long, long>(static_cast<long>(std::floor(p.x() / cut)),
                                 static_cast<long>(std::floor(p.y() / cut)));
  };
  struct PairHash {
    size_t operator()(const std::pair<long, long>& c) const {
      return std::hash<long>()(c.first * 1000003L + c.second);
    }
  };
  std::unordered_map<std::pair<long, long>, std::vector<int>, PairHash> cells;
  for (size_t i = 0; i < n; ++i)
    cells[cell_of(g.nodes[i])].push_back(static_cast<int>(i));

  std::vector<std::vector<int>> nbr(n);
  for (size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(g.nodes[i]);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = cells.find({cx + dx, cy + dy});
        if (it == cells.end()) continue;
        for (int j : it->second) {
          if (opt.exclude_self && j == static_cast<int>(i)) continue;
          if ((g.nodes[i] - g.nodes[j]).norm() <= cut) nbr[i].push_back(j);
        }
      }
    std::sort(nbr[i].begin(), nbr[i].end());
  }
  row_.assign(n + 1, 0);
  for (size_t i = 0; i < n; ++i) row_[i + 1] = row_[i] + nbr[i].size();
  col_.resize(row_[n]);
  gain_.resize(row_[n]);
  g_.resize(row_[n]);
  q_.assign(n, Mat2c::Zero());
  for_rows(opt.exec, static_cast<long>(n), [&](long i) {
    Mat2 loss = Mat2::Zero();
    size_t e = row_[i];
    for (int j : nbr[i]) {
      const Vec2 d = g.nodes[i] - g.nodes[j];
      const double qt2 = kg * kg * d.squaredNorm();
      const double rho = m.psd3_tz(qt2, kg * (b[i] - b[j]));
      const Mat2 G = gamma_aa_raw(g.nodes[i], nr[i], b[i], g.nodes[j], nr[j], b[j]);
      const double gij = pref * g.weights[j] * rho;
      col_[e] = j;
      gain_[e] = gij;
      g_[e] = {G(0, 0), G(0, 1), G(1, 0), G(1, 1)};
      loss += gij * G * G.transpose();
      ++e;
    }
    loss = 0.5 * (loss + loss.transpose()).eval();
    q_[i] = (-0.5 * loss).cast<cplx>();
  });
}

void TransportOperator::build_rings(const SpectralMedium& m,
                                    const TransportOptions& opt) {
  const DirectionGrid& g = *grid_;
  const int nr = g.n_radial();
  const double kg = m.k() / m.gamma();
  const double pref = gain_prefactor(m);
  w_.resize(nr);
  for (int i = 0; i < nr; ++i) w_[i] = g.radial_weights[i] * g.radii[i] * kTwoPi;
  std::vector<double> b(nr);
  for (int i = 0; i < nr; ++i) b[i] = std::sqrt(1.0 - g.radii[i] * g.radii[i]);
  ring_.assign(static_cast<size_t>(nr) * nr, {0, 0, 0, 0, 0, 0});
  const Rule& gw = gauss_legendre_ref(opt.psi_window_nodes);
  const Rule& go = gauss_legendre_ref(opt.psi_outer_nodes);

  for_rows(opt.exec, nr, [&](long i) {
    const double ri = g.radii[i];
    const Vec2 ki(ri, 0.0);
    for (int j = static_cast<int>(i); j < nr; ++j) {
      const double rj = g.radii[j];
      const double dr = kg * (ri - rj);
      if (dr * dr > opt.cutoff_sigma * opt.cutoff_sigma) continue;
      const double qz = kg * (b[i] - b[j]);
      const double tw = std::min(kPi, opt.psi_window / kg / std::sqrt(ri * rj));
      std::array<double, 6> acc{0, 0, 0, 0, 0, 0};
      auto band = [&](const Rule& ref, double t0, double t1) {
        const double c = 0.5 * (t0 + t1), h = 0.5 * (t1 - t0);
        for (size_t s = 0; s < ref.size(); ++s) {
          const double psi = c + h * ref.x[s];
          const Vec2 kj(rj * std::cos(psi), rj * std::sin(psi));
          const double qt2 = kg * kg * (ri * ri + rj * rj - 2.0 * ri * rj * std::cos(psi));
          const double rho = h * ref.w[s] * m.psd3_tz(qt2, qz);
          const Mat2 G = gamma_aa_raw(ki, ri, b[i], kj, rj, b[j]);
          acc[0] += rho * G(0, 0) * G(0, 0);
          acc[1] += rho * G(0, 1) * G(0, 1);
          acc[2] += rho * G(1, 0) * G(1, 0);
          acc[3] += rho * G(1, 1) * G(1, 1);
          acc[4] += rho * G(0, 0) * G(1, 1);
          acc[5] += rho * G(0, 1) * G(1, 0);
        }
      };
      band(gw, 0.0, tw);
      if (tw < kPi) band(go, tw, kPi);
      // Full circle = twice the half circle for the even combinations.
      const double tij = 2.0 * pref * g.radial_weights[j] * rj;
      const double tji = 2.0 * pref * g.radial_weights[i] * ri;
      auto& a = ring_[static_cast<size_t>(i) * nr + j];
      a = {tij * acc[0], tij * acc[1], tij * acc[2], tij * acc[3], tij * acc[4], tij * acc[5]};
      if (j != i) {
        auto& c = ring_[static_cast<size_t>(j) * nr + i];
        c = {tji * acc[0], tji * acc[2], tji * acc[1], tji * acc[3], tji * acc[4], tji * acc[5]};
      }
    }
  });
  q_.assign(nr, Mat2c::Zero());
  for (int i = 0; i < nr; ++i) {
    double l1 = 0.0, l2 = 0.0;
    for (int j = 0; j < nr; ++j) {
      const auto& a = ring_[static_cast<size_t>(i) * nr + j];
      l1 += a[0] + a[1];
      l2 += a[2] + a[3];
    }
    q_[i](0, 0) = -0.5 * l1;
    q_[i](1, 1) = -0.5 * l2;
  }
}

size_t TransportOperator::n_couplings() const {
  return reduced_ ? ring_.size() : col_.size();
}

void TransportOperator::apply(const std::vector<H2>& P, std::vector<H2>& out,
                              Exec exec) const {
  const size_t n = w_.size();
  if (P.size() != n) throw ValidationError("state does not match the grid");
  out.resize(n);
  if (reduced_) {
    for_rows(exec, static_cast<long>(n), [&](long i) {
      H2 r = loss_term(q_[i], P[i]);
      const auto* t = &ring_[static_cast<size_t>(i) * n];
      double gp = 0, gq = 0, gr = 0, gi = 0;
      for (size_t j = 0; j < n; ++j) {
        const auto& a = t[j];
        const H2& s = P[j];
        gp += a[0] * s.p + a[1] * s.q;
        gq += a[2] * s.p + a[3] * s.q;
        gr += (a[4] + a[5]) * s.cr;
        gi += (a[4] - a[5]) * s.ci;
      }
      r.p += gp;
      r.q += gq;
      r.cr += gr;
      r.ci += gi;
      out[i] = r;
    });
  } else {
    for_rows(exec, static_cast<long>(n), [&](long i) {
      H2 r = loss_term(q_[i], P[i]);
      double gp = 0, gq = 0, gr = 0, gi = 0;
      for (size_t e = row_[i]; e < row_[i + 1]; ++e) {
        const H2& s = P[col_[e]];
        const auto& G = g_[e];
        const double w = gain_[e];
        const double a = G[0], b = G[1], c = G[2], d = G[3];
        gp += w * (a * a * s.p + 2.0 * a * b * s.cr + b * b * s.q);
        gq += w * (c * c * s.p + 2.0 * c * d * s.cr + d * d * s.q);
        gr += w * (a * c * s.p + (a * d + b * c) * s.cr + b * d * s.q);
        gi += w * (a * d - b * c) * s.ci;
      }
      r.p += gp;
      r.q += gq;
      r.cr += gr;
      r.ci += gi;
      out[i] = r;
    });
  }
}

std::vector<H2> TransportOperator::reduce(const CoherenceField& f) const {
  if (f.P.size() != grid_->size())
    throw ValidationError("coherence field and operator grids differ");
  std::vector<H2> s(w_.size());
  if (reduced_) {
    const int na = grid_->n_angular;
    for (size_t i = 0; i < s.size(); ++i) {
      s[i] = H2::from(f.P[i * na]);
      const double scale = std::max(1e-300, f.P[i * na].norm());
      for (int j = 1; j < na; ++j)
        if ((f.P[i * na + j] - f.P[i * na]).norm() > 1e-10 * scale)
          throw ValidationError(
              "ring-reduced transport needs rotation-invariant data");
    }
  } else {
    for (size_t i = 0; i < s.size(); ++i) s[i] = H2::from(f.P[i]);
  }
  return s;
}

CoherenceField TransportOperator::expand(const std::vector<H2>& s,
                                         double z) const {
  CoherenceField f;
  f.grid = grid_;
  f.z = z;
  f.P.resize(grid_->size());
  if (reduced_) {
    const int na = grid_->n_angular;
    for (size_t i = 0; i < s.size(); ++i)
      for (int j = 0; j < na; ++j) f.P[i * na + j] = s[i].mat();
  } else {
    for (size_t i = 0; i < s.size(); ++i) f.P[i] = s[i].mat();
  }
  return f;
}

std::vector<Mat2c> scattering_rhs(const TransportOperator& op,
                                  const CoherenceField& P) {
  std::vector<H2> out;
  op.apply(op.reduce(P), out);
  return op.expand(out, P.z).P;
}

double total_energy(const std::vector<H2>& s, const std::vector<double>& w,
                    double k) {
  double e = 0.0;
  for (size_t i = 0; i < s.size(); ++i) e += w[i] * s[i].trace();
  return e * k * k / (kTwoPi * kTwoPi);
}

double total_energy(const CoherenceField& P, double k) {
  double e = 0.0;
  for (size_t i = 0; i < P.P.size(); ++i)
    e += P.grid->weights[i] * (P.P[i](0, 0).real() + P.P[i](1, 1).real());
  return e * k * k / (kTwoPi * kTwoPi);
}

double power_coefficient(const std::vector<H2>& s,
                         const std::vector<double>& w) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    num += w[i] * (s[i].p - s[i].q);
    den += w[i] * (s[i].p + s[i].q);
  }
  if (!(den > 0.0)) throw ValidationError("zero energy: C_P undefined");
  return num / den;
}

double power_coefficient(const CoherenceField& P) {
  std::vector<H2> s(P.P.size());
  for (size_t i = 0; i < s.size(); ++i) s[i] = H2::from(P.P[i]);
  return power_coefficient(s, P.grid->weights);
}

Stokes4 stokes(const Mat2c& P) {
  Stokes4 s;
  s.s1 = P(0, 0).real() + P(1, 1).real();
  s.s2 = P(0, 0).real() - P(1, 1).real();
  s.s3 = 2.0 * P(0, 1).real();
  s.s4 = 2.0 * P(0, 1).imag();
  s.pol = s.s1 > 0.0 ? std::sqrt(s.s2 * s.s2 + s.s3 * s.s3 + s.s4 * s.s4) / s.s1
                     : 0.0;
  return s;
}

StokesState stokes(const CoherenceField& P) {
  StokesState out;
  for (const Mat2c& m : P.P) {
    const Stokes4 s = stokes(m);
    out.s1.push_back(s.s1);
    out.s2.push_back(s.s2);
    out.s3.push_back(s.s3);
    out.s4.push_back(s.s4);
    out.pol.push_back(s.pol);
  }
  return out;
}

SheetPoint wigner_sheet(const CoherenceField& P, const Vec2& kappa, double z) {
  const auto& nodes = P.grid->nodes;
  for (size_t i = 0; i < nodes.size(); ++i)
    if ((nodes[i] - kappa).norm() <= 1e-12) {
      return {kappa * z / beta(kappa), P.P[i]};
    }
  throw ValidationError("no grid node at the requested kappa");
}

CoherenceField initial_field(std::shared_ptr<const DirectionGrid> grid,
                             const SourceSpec& src) {
  CoherenceField f;
  f.grid = grid;
  f.P.resize(grid->size());
  for (size_t i = 0; i < grid->size(); ++i)
    f.P[i] = initial_coherence(src, grid->nodes[i]);
  return f;
}

double default_step(const ScatteringKernelField& kf, double fraction) {
  double m = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < kf.size(); ++i)
    m = std::min({m, kf.mfp_tm[i], kf.mfp_te[i]});
  return m * fraction;
}

namespace {

struct StepStats {
  double energy, min_eig, c_p, p12_ratio;
};

StepStats measure(const std::vector<H2>& s, const std::vector<double>& w,
                  double k, double floor) {
  double tmax = 0.0, p11max = 0.0, p12max = 0.0;
  for (const H2& h : s) {
    tmax = std::max(tmax, h.trace());
    p11max = std::max(p11max, h.p);
    p12max = std::max(p12max, std::hypot(h.cr, h.ci));
  }
  double me = 0.0;
  for (const H2& h : s) {
    const double t = h.trace();
    if (t > floor * tmax) me = std::min(me, h.min_eig() / t);
  }
  StepStats st;
  st.energy = total_energy(s, w, k);
  st.min_eig = me;
  st.c_p = power_coefficient(s, w);
  st.p12_ratio = p11max > 0.0 ? p12max / p11max : 0.0;
  return st;
}

}  // namespace

EvolveResult evolve(const TransportOperator& op, const CoherenceField& P0,
                    double z_end, double dz, const EvolveOptions& opt) {
  if (!(dz > 0.0)) throw ValidationError("dz must be positive");
  if (!(z_end >= 0.0)) throw ValidationError("z_end must be nonnegative");
  std::vector<double> stops;
  for (double z : opt.snapshots)
    if (z >= 0.0 && z <= z_end) stops.push_back(z);
  stops.push_back(z_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  const auto& w = op.weights();
  std::vector<H2> s = op.reduce(P0);
  const size_t n = s.size();
  std::vector<H2> k1(n), k2(n), k3(n), k4(n), tmp(n);

  EvolveResult res;
  auto record = [&](double z) {
    const StepStats st = measure(s, w, op.k(), opt.tail_floor);
    res.trajectory.push_back({z, st.energy, st.min_eig, st.c_p, st.p12_ratio});
    res.worst_min_eig = std::min(res.worst_min_eig, st.min_eig);
    res.max_p12_ratio = std::max(res.max_p12_ratio, st.p12_ratio);
    const double e0 = res.trajectory.front().energy;
    res.max_drift = std::max(res.max_drift, std::abs(st.energy - e0) / e0);
    if (st.min_eig < -opt.positivity_tol)
      throw NumericalError("positivity breach: min eigenvalue ratio " +
                           std::to_string(st.min_eig));
    if (res.max_drift > opt.drift_tol)
      throw NumericalError("energy drift " + std::to_string(res.max_drift));
  };
  auto axpy = [&](const std::vector<H2>& a, double h, const std::vector<H2>& b,
                  std::vector<H2>& o) {
    for (size_t i = 0; i < n; ++i)
      o[i] = {a[i].p + h * b[i].p, a[i].q + h * b[i].q, a[i].cr + h * b[i].cr,
              a[i].ci + h * b[i].ci};
  };

  double z = 0.0;
  record(z);
  long step = 0;
  for (double stop : stops) {
    if (stop > z) {
      const long m = static_cast<long>(std::ceil((stop - z) / dz - 1e-9));
      const double h = (stop - z) / m;
      const double z0 = z;
      for (long t = 0; t < m; ++t) {
        op.apply(s, k1);
        axpy(s, 0.5 * h, k1, tmp);
        op.apply(tmp, k2);
        axpy(s, 0.5 * h, k2, tmp);
        op.apply(tmp, k3);
        axpy(s, h, k3, tmp);
        op.apply(tmp, k4);
        for (size_t i = 0; i < n; ++i) {
          s[i].p += h / 6.0 * (k1[i].p + 2.0 * k2[i].p + 2.0 * k3[i].p + k4[i].p);
          s[i].q += h / 6.0 * (k1[i].q + 2.0 * k2[i].q + 2.0 * k3[i].q + k4[i].q);
          s[i].cr += h / 6.0 * (k1[i].cr + 2.0 * k2[i].cr + 2.0 * k3[i].cr + k4[i].cr);
          s[i].ci += h / 6.0 * (k1[i].ci + 2.0 * k2[i].ci + 2.0 * k3[i].ci + k4[i].ci);
        }
        z = (t + 1 == m) ? stop : z0 + (t + 1) * h;
        ++step;
        if (step % std::max(1, opt.record_every) == 0 || t + 1 == m) record(z);
      }
    }
    for (double snap : opt.snapshots)
      if (snap == stop) res.snapshots.push_back(op.expand(s, stop));
  }
  res.final = op.expand(s, z);
  return res;
}

}  // namespace polx
