#include "polx/medium.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <gsl/gsl_sf_dawson.h>

#include "tabulated.hpp"

namespace polx {

namespace {
constexpr double kSqrtHalfPi = 1.2533141373155002512;
constexpr double kSqrt2 = 1.4142135623730950488;
const double kTwoPi32 = std::pow(kTwoPi, 1.5);

// int_0^inf exp(-zeta^2 / (2 l^2)) exp(-i b zeta) dzeta
cplx half_line_gauss(double b, double l) {
  const double bl = b * l;
  return l * cplx(kSqrtHalfPi * std::exp(-0.5 * bl * bl),
                  -kSqrt2 * gsl_sf_dawson(bl / kSqrt2));
}
}  // namespace

SpectralMedium SpectralMedium::gaussian(double alpha, double gamma,
                                        double gamma_j, double k) {
  SpectralMedium m;
  m.alpha_ = alpha;
  m.gamma_ = gamma;
  m.gamma_j_ = gamma_j;
  m.k_ = k;
  m.validate();
  return m;
}

SpectralMedium SpectralMedium::gaussian_transverse(double alpha, double gamma,
                                                   double gamma_j, double ell_z,
                                                   double k) {
  if (!(ell_z > 0.0)) throw ValidationError("ell_z must be positive");
  SpectralMedium m = gaussian(alpha, gamma, gamma_j, k);
  m.model_ = MediumModel::GaussianTransverse;
  m.ell_z_ = ell_z;
  return m;
}

SpectralMedium SpectralMedium::tabulated(double alpha, double gamma,
                                         double gamma_j,
                                         const CorrelationTable& table,
                                         double k) {
  SpectralMedium m = gaussian(alpha, gamma, gamma_j, k);
  m.model_ = MediumModel::Tabulated;
  m.tab_ = std::make_shared<const TabulatedSpectra>(table);
  return m;
}

void SpectralMedium::validate() const {
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_))
    throw ValidationError("alpha must be positive");
  if (!(gamma_ > 0.0 && gamma_ < 1.0))
    throw ValidationError("gamma must lie in (0, 1)");
  if (!(gamma_j_ > 0.0) || !std::isfinite(gamma_j_))
    throw ValidationError("gamma_j must be positive");
  if (!(k_ > 0.0) || !std::isfinite(k_))
    throw ValidationError("k must be positive");
}

SpectralMedium SpectralMedium::with_gamma(double gamma) const {
  SpectralMedium m = *this;
  m.gamma_ = gamma;
  m.validate();
  return m;
}

SpectralMedium SpectralMedium::with_alpha(double alpha) const {
  SpectralMedium m = *this;
  m.alpha_ = alpha;
  m.validate();
  return m;
}

double SpectralMedium::r0() const {
  return model_ == MediumModel::Tabulated ? tab_->autocorr(0.0, 0.0) : 1.0;
}

double SpectralMedium::autocorr(const Vec3& r) const {
  const double rt2 = r.x() * r.x() + r.y() * r.y();
  switch (model_) {
    case MediumModel::GaussianIsotropic:
      return std::exp(-0.5 * (rt2 + r.z() * r.z()));
    case MediumModel::GaussianTransverse:
      return std::exp(-0.5 * (rt2 + r.z() * r.z() / (ell_z_ * ell_z_)));
    case MediumModel::Tabulated:
      return tab_->autocorr(std::sqrt(rt2), std::abs(r.z()));
  }
  return 0.0;
}

double SpectralMedium::psd3_tz(double qt2, double qz) const {
  switch (model_) {
    case MediumModel::GaussianIsotropic:
      return kTwoPi32 * std::exp(-0.5 * (qt2 + qz * qz));
    case MediumModel::GaussianTransverse:
      return kTwoPi32 * ell_z_ *
             std::exp(-0.5 * (qt2 + ell_z_ * ell_z_ * qz * qz));
    case MediumModel::Tabulated:
      return tab_->psd3(std::sqrt(qt2), std::abs(qz));
  }
  return 0.0;
}

double SpectralMedium::psd3(const Vec3& q) const {
  return psd3_tz(q.x() * q.x() + q.y() * q.y(), q.z());
}

double SpectralMedium::psd_partial(const Vec2& qt, double zeta) const {
  const double qt2 = qt.squaredNorm();
  switch (model_) {
    case MediumModel::GaussianIsotropic:
      return kTwoPi * std::exp(-0.5 * (qt2 + zeta * zeta));
    case MediumModel::GaussianTransverse:
      return kTwoPi *
             std::exp(-0.5 * (qt2 + zeta * zeta / (ell_z_ * ell_z_)));
    case MediumModel::Tabulated:
      return tab_->psd_partial(std::sqrt(qt2), std::abs(zeta));
  }
  return 0.0;
}

cplx SpectralMedium::dispersion_tz(double qt2, double b) const {
  switch (model_) {
    case MediumModel::GaussianIsotropic: {
      const double e = -0.5 * qt2;
      if (e < -745.0) return 0.0;
      return kTwoPi * std::exp(e) * half_line_gauss(b, 1.0);
    }
    case MediumModel::GaussianTransverse: {
      const double e = -0.5 * qt2;
      if (e < -745.0) return 0.0;
      return kTwoPi * std::exp(e) * half_line_gauss(b, ell_z_);
    }
    case MediumModel::Tabulated:
      return tab_->dispersion(std::sqrt(qt2), b);
  }
  return 0.0;
}

cplx SpectralMedium::dispersion_integral(const Vec2& qt, double b) const {
  return dispersion_tz(qt.squaredNorm(), b);
}

double SpectralMedium::lag_integral(double s) const {
  switch (model_) {
    case MediumModel::GaussianIsotropic:
      return std::sqrt(kTwoPi / (s * s + 1.0));
    case MediumModel::GaussianTransverse:
      return std::sqrt(kTwoPi / (s * s + 1.0 / (ell_z_ * ell_z_)));
    case MediumModel::Tabulated:
      return tab_->lag_integral(s);
  }
  return 0.0;
}

double SpectralMedium::iso_half_integral() const {
  if (!isotropic()) throw ValidationError("medium is not fully isotropic");
  return kSqrtHalfPi;
}

double SpectralMedium::psd_iso(double q) const {
  if (!isotropic()) throw ValidationError("medium is not fully isotropic");
  return kTwoPi32 * std::exp(-0.5 * q * q);
}

CorrelationTable read_correlation_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open correlation table: " + path);
  std::map<std::pair<double, double>, double> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
        !std::getline(ss, c))
      throw ValidationError("correlation table line " + std::to_string(lineno) +
                            ": expected rt,rz,value");
    try {
      rows[{std::stod(a), std::stod(b)}] = std::stod(c);
    } catch (const std::exception&) {
      if (lineno == 1) continue;  // header
      throw ValidationError("correlation table line " +
                            std::to_string(lineno) + ": not numeric");
    }
  }
  CorrelationTable t;
  for (const auto& [key, v] : rows) {
    if (t.rt.empty() || t.rt.back() != key.first) t.rt.push_back(key.first);
    if (t.rt.size() == 1) t.rz.push_back(key.second);
    t.values.push_back(v);
  }
  if (t.rt.size() < 4 || t.rz.size() < 4 ||
      t.values.size() != t.rt.size() * t.rz.size())
    throw ValidationError("correlation table is not a full product grid");
  return t;
}

}  // namespace polx
