#include "polx/hflimit.hpp"

#include <algorithm>
#include <cmath>

#include <fftw3.h>

#include "polx/geometry.hpp"
#include "polx/quadrature.hpp"

namespace polx {

double q_hf(const SpectralMedium& m) {
  // -(k^4 a^2 / 8) (2 pi)^-2 int R~(k u, 0) du; the u integral of the
  // Gaussian spectrum is (2 pi)^{3/2} l_z 2 pi / k^2.
  const double k = m.k(), a = m.alpha();
  switch (m.model()) {
    case MediumModel::GaussianIsotropic:
      return -k * k * a * a / 8.0 * std::sqrt(kTwoPi);
    case MediumModel::GaussianTransverse:
      return -k * k * a * a / 8.0 * std::sqrt(kTwoPi) * m.ell_z();
    case MediumModel::Tabulated:
      return q_hf_quadrature(m);
  }
  return 0.0;
}

double q_hf_quadrature(const SpectralMedium& m) {
  const double k = m.k(), a = m.alpha();
  const Rule r = composite_gauss_legendre(0.0, 14.0 / k, 8, 16);
  double s = 0.0;
  for (size_t i = 0; i < r.size(); ++i)
    s += r.w[i] * r.x[i] * m.psd3_tz(k * k * r.x[i] * r.x[i], 0.0);
  s *= kTwoPi;
  return -std::pow(k, 4) * a * a / 8.0 * s / (kTwoPi * kTwoPi);
}

double hf_mfp(const SpectralMedium& m) { return -1.0 / q_hf(m); }

double hf_mfp_leading(const SpectralMedium& m, const Vec2& kappa) {
  const double b = beta(kappa);
  const double k = m.k(), a = m.alpha();
  return m.gamma() / (k * k) * 8.0 * b * b /
         (a * a * m.lag_integral(kappa.norm() / b));
}

double paraxial_mfp(const SpectralMedium& m, double ell) {
  const double k = m.k(), a = m.alpha();
  return 8.0 / (k * k * ell * a * a * m.lag_integral(0.0));
}

Mat2 hf_rotation(const Vec2& kappa) {
  const double n = kappa.norm();
  if (!(n > 0.0)) throw ValidationError("rotation undefined at kappa = 0");
  Mat2 r;
  r << kappa.x(), -kappa.y(), kappa.y(), kappa.x();
  return r / n;
}

Mat2c rotate_to_cartesian(const Mat2c& P, const Vec2& kappa) {
  const Mat2 R = hf_rotation(kappa);
  return R.cast<cplx>() * P * R.transpose().cast<cplx>();
}

Mat2c rotate_from_cartesian(const Mat2c& Pt, const Vec2& kappa) {
  const Mat2 R = hf_rotation(kappa);
  return R.transpose().cast<cplx>() * Pt * R.cast<cplx>();
}

HFLattice make_hf_lattice(double k, double radius, double spacing,
                          double pad) {
  if (!(radius > 0.0)) throw ValidationError("lattice radius must be positive");
  const double h = spacing > 0.0 ? spacing : 1.0 / (4.0 * k);
  if (h > 1.0 / (4.0 * k) * (1.0 + 1e-12))
    throw ValidationError("lattice spacing must not exceed 1/(4k)");
  const double p = pad >= 0.0 ? pad : 8.0 / k;
  int n = 8;
  while (n * h < 2.0 * (radius + p)) n *= 2;
  HFLattice lat;
  lat.n = n;
  lat.h = h;
  lat.nodes.resize(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      lat.nodes[static_cast<size_t>(a) * n + b] =
          Vec2((a - n / 2 + 0.5) * h, (b - n / 2 + 0.5) * h);
  return lat;
}

HFCoherenceField hf_initial_x1(const HFLattice& lat, double kbar_j, double k) {
  HFCoherenceField f;
  f.lattice = lat;
  f.p_tilde.assign(lat.size(), Mat2c::Zero());
  for (size_t i = 0; i < lat.size(); ++i) {
    const double s = k * lat.nodes[i].norm() / kbar_j;
    f.p_tilde[i](0, 0) = std::exp(-0.5 * s * s);
  }
  return f;
}

double hf_kernel_weight(const SpectralMedium& m, const Vec2& d, double h) {
  const double k = m.k(), a = m.alpha();
  return k * k * a * a / 4.0 * k * k / (kTwoPi * kTwoPi) *
         m.psd3_tz(k * k * d.squaredNorm(), 0.0) * h * h;
}

double hf_energy(const HFCoherenceField& f, double k) {
  double s = 0.0;
  for (const Mat2c& p : f.p_tilde) s += p(0, 0).real() + p(1, 1).real();
  return s * f.lattice.weight() * k * k / (kTwoPi * kTwoPi);
}

namespace {

// Minimal-image displacement between lattice nodes i and j.
Vec2 displacement(const HFLattice& lat, size_t i, size_t j) {
  const int n = lat.n;
  auto wrap = [n](int d) {
    d %= n;
    if (d >= n / 2) d -= n;
    if (d < -n / 2) d += n;
    return d;
  };
  const int da = wrap(static_cast<int>(i / n) - static_cast<int>(j / n));
  const int db = wrap(static_cast<int>(i % n) - static_cast<int>(j % n));
  return Vec2(da * lat.h, db * lat.h);
}

class Fft2 {
 public:
  explicit Fft2(int n) : n_(n) {
    buf_ = fftw_alloc_complex(static_cast<size_t>(n) * n);
    fwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(n, n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  void forward(std::vector<cplx>& v) { run(v, fwd_, 1.0); }
  void backward(std::vector<cplx>& v) {
    run(v, bwd_, 1.0 / (static_cast<double>(n_) * n_));
  }

 private:
  void run(std::vector<cplx>& v, fftw_plan p, double scale) {
    std::copy(v.begin(), v.end(), reinterpret_cast<cplx*>(buf_));
    fftw_execute(p);
    const cplx* b = reinterpret_cast<const cplx*>(buf_);
    for (size_t i = 0; i < v.size(); ++i) v[i] = b[i] * scale;
  }
  int n_;
  fftw_complex* buf_;
  fftw_plan fwd_, bwd_;
};

}  // namespace

HFEvolveResult evolve_p_tilde(const SpectralMedium& m,
                              const HFCoherenceField& P0, double z_end,
                              double dz, int record_every) {
  if (!(dz > 0.0)) throw ValidationError("dz must be positive");
  if (!(z_end >= 0.0)) throw ValidationError("z_end must be nonnegative");
  const HFLattice& lat = P0.lattice;
  const size_t N = lat.size();
  if (P0.p_tilde.size() != N) throw ValidationError("field/lattice mismatch");
  Fft2 fft(lat.n);

  // Kernel on lattice displacements, in FFT index order.
  std::vector<cplx> ker(N);
  for (size_t i = 0; i < N; ++i) ker[i] = hf_kernel_weight(m, displacement(lat, i, 0), lat.h);
  fft.forward(ker);
  std::vector<double> lam(N);
  for (size_t i = 0; i < N; ++i) lam[i] = ker[i].real() - ker[0].real();

  // Entries: 0 = P11, 1 = P22, 2 = P12.
  std::vector<cplx> f[3];
  for (auto& v : f) v.resize(N);
  for (size_t i = 0; i < N; ++i) {
    f[0][i] = P0.p_tilde[i](0, 0);
    f[1][i] = P0.p_tilde[i](1, 1);
    f[2][i] = P0.p_tilde[i](0, 1);
  }
  for (auto& v : f) fft.forward(v);

  const long steps = std::max(0L, static_cast<long>(std::ceil(z_end / dz - 1e-9)));
  const double h = steps > 0 ? z_end / steps : 0.0;
  std::vector<double> amp(N);
  for (size_t i = 0; i < N; ++i) {
    const double x = lam[i] * h;
    amp[i] = 1.0 + x * (1.0 + x / 2.0 * (1.0 + x / 3.0 * (1.0 + x / 4.0)));
  }

  HFEvolveResult res;
  const double ew = lat.weight() * m.k() * m.k() / (kTwoPi * kTwoPi);
  auto physical = [&](double z) {
    HFCoherenceField out;
    out.lattice = lat;
    out.z = z;
    out.p_tilde.assign(N, Mat2c::Zero());
    std::vector<cplx> g[3] = {f[0], f[1], f[2]};
    for (auto& v : g) fft.backward(v);
    for (size_t i = 0; i < N; ++i) {
      out.p_tilde[i](0, 0) = g[0][i].real();
      out.p_tilde[i](1, 1) = g[1][i].real();
      out.p_tilde[i](0, 1) = g[2][i];
      out.p_tilde[i](1, 0) = std::conj(g[2][i]);
    }
    return out;
  };
  auto record = [&](double z) {
    const HFCoherenceField s = physical(z);
    double cross = 0.0;
    for (const Mat2c& p : s.p_tilde)
      cross = std::max({cross, std::abs(p(1, 1)), std::abs(p(0, 1))});
    res.trajectory.push_back({z, (f[0][0].real() + f[1][0].real()) * ew, cross});
  };
  record(0.0);
  for (long t = 0; t < steps; ++t) {
    for (auto& v : f)
      for (size_t i = 0; i < N; ++i) v[i] *= amp[i];
    if ((t + 1) % std::max(1, record_every) == 0 || t + 1 == steps)
      record((t + 1) * h);
  }
  res.final = physical(steps * h);
  return res;
}

std::vector<Mat2c> trhf_rhs(const SpectralMedium& m, const HFLattice& lat,
                            const std::vector<Mat2c>& P) {
  const size_t N = lat.size();
  std::vector<Mat2c> out(N, Mat2c::Zero());
  for (size_t i = 0; i < N; ++i) {
    Mat2c acc = Mat2c::Zero();
    for (size_t j = 0; j < N; ++j) {
      const double w = hf_kernel_weight(m, displacement(lat, i, j), lat.h);
      if (w == 0.0) continue;
      const Mat2 G = gamma_hf(lat.nodes[i], lat.nodes[j]);
      acc += w * (G.cast<cplx>() * P[j] * G.transpose().cast<cplx>() - P[i]);
    }
    out[i] = acc;
  }
  return out;
}

std::vector<Mat2c> tilde_rhs(const SpectralMedium& m, const HFLattice& lat,
                             const std::vector<Mat2c>& Pt) {
  const size_t N = lat.size();
  std::vector<Mat2c> out(N, Mat2c::Zero());
  for (size_t i = 0; i < N; ++i)
    for (size_t j = 0; j < N; ++j) {
      const double w = hf_kernel_weight(m, displacement(lat, i, j), lat.h);
      out[i] += w * (Pt[j] - Pt[i]);
    }
  return out;
}

}  // namespace polx
