#pragma once

#include <vector>

namespace polx {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  size_t size() const { return x.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1]; cached, safe to call concurrently.
const Rule& gauss_legendre_ref(int n);

/// n-point Gauss-Legendre rule mapped to [a, b].
Rule gauss_legendre(int n, double a, double b);

/// `panels` equal panels on [a, b], `order` Gauss points each.
Rule composite_gauss_legendre(double a, double b, int panels, int order);

}  // namespace polx
