#include "polx/grid.hpp"

#include <cmath>

#include "polx/quadrature.hpp"

namespace polx {

double DirectionGrid::angle(size_t i) const {
  return std::atan2(nodes[i].y(), nodes[i].x());
}

DirectionGrid DirectionGrid::polar(int n_radial, int n_angular,
                                   double kappa_max) {
  if (n_radial < 1 || n_angular < 1)
    throw ValidationError("grid sizes must be positive");
  if (!(kappa_max > 0.0 && kappa_max < 1.0))
    throw ValidationError("kappa_max must lie in (0, 1)");
  DirectionGrid g;
  g.layout = GridLayout::PolarIsotropic;
  g.kappa_max = kappa_max;
  g.n_angular = n_angular;
  const Rule r = gauss_legendre(n_radial, 0.0, kappa_max);
  g.radii = r.x;
  g.radial_weights = r.w;
  const double dt = kTwoPi / n_angular;
  for (int i = 0; i < n_radial; ++i)
    for (int j = 0; j < n_angular; ++j) {
      const double t = j * dt;
      g.nodes.emplace_back(r.x[i] * std::cos(t), r.x[i] * std::sin(t));
      g.weights.push_back(r.w[i] * r.x[i] * dt);
    }
  return g;
}

DirectionGrid DirectionGrid::cartesian(double spacing, double kappa_max) {
  if (!(spacing > 0.0)) throw ValidationError("spacing must be positive");
  if (!(kappa_max > 0.0 && kappa_max < 1.0))
    throw ValidationError("kappa_max must lie in (0, 1)");
  DirectionGrid g;
  g.layout = GridLayout::Cartesian;
  g.kappa_max = kappa_max;
  g.spacing = spacing;
  const int m = static_cast<int>(std::ceil(kappa_max / spacing)) + 1;
  for (int a = -m; a < m; ++a)
    for (int b = -m; b < m; ++b) {
      const Vec2 p((a + 0.5) * spacing, (b + 0.5) * spacing);
      if (p.norm() <= kappa_max) {
        g.nodes.push_back(p);
        g.weights.push_back(spacing * spacing);
      }
    }
  return g;
}

DirectionGrid DirectionGrid::general(std::vector<Vec2> nodes,
                                     std::vector<double> weights,
                                     double kappa_max) {
  if (nodes.size() != weights.size())
    throw ValidationError("node and weight counts differ");
  for (size_t i = 0; i < nodes.size(); ++i) {
    const double n = nodes[i].norm();
    if (!(n > 0.0) || n > kappa_max || !(weights[i] > 0.0))
      throw ValidationError("grid node outside (0, kappa_max] or bad weight");
  }
  DirectionGrid g;
  g.layout = GridLayout::General;
  g.kappa_max = kappa_max;
  g.nodes = std::move(nodes);
  g.weights = std::move(weights);
  return g;
}

}  // namespace polx
