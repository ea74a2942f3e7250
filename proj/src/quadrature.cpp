#include "polx/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <gsl/gsl_integration.h>

#include "polx/types.hpp"

namespace polx {

const Rule& gauss_legendre_ref(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<Rule>();
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
    slot->x.resize(n);
    slot->w.resize(n);
    for (int i = 0; i < n; ++i)
      gsl_integration_glfixed_point(-1.0, 1.0, i, &slot->x[i], &slot->w[i], t);
    gsl_integration_glfixed_table_free(t);
  }
  return *slot;
}

Rule gauss_legendre(int n, double a, double b) {
  const Rule& ref = gauss_legendre_ref(n);
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = c + h * ref.x[i];
    r.w[i] = h * ref.w[i];
  }
  return r;
}

Rule composite_gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1 || order < 1) throw ValidationError("quadrature needs positive panel and order counts");
  Rule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    Rule s = gauss_legendre(order, a + p * h, a + (p + 1) * h);
    r.x.insert(r.x.end(), s.x.begin(), s.x.end());
    r.w.insert(r.w.end(), s.w.begin(), s.w.end());
  }
  return r;
}

}  // namespace polx
