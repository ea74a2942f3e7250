#pragma once

#include <vector>

#include "polx/types.hpp"

namespace polx {

enum class GridLayout { PolarIsotropic, Cartesian, General };

/// Quadrature nodes in the propagating disk. Weights integrate d kappa
/// (without the k^2/(2 pi)^2 factor). No node sits at the origin.
struct DirectionGrid {
  GridLayout layout = GridLayout::General;
  std::vector<Vec2> nodes;
  std::vector<double> weights;
  double kappa_max = 0.95;

  // Polar layout: node index = i * n_angular + j, kappa = r_i (cos t_j, sin t_j)
  std::vector<double> radii;
  std::vector<double> radial_weights;
  int n_angular = 0;
  // Cartesian layout: lattice spacing; nodes at (m + 1/2) h.
  double spacing = 0.0;

  size_t size() const { return nodes.size(); }
  int n_radial() const { return static_cast<int>(radii.size()); }
  double radius(size_t i) const { return nodes[i].norm(); }
  double angle(size_t i) const;

  static DirectionGrid polar(int n_radial, int n_angular, double kappa_max);
  static DirectionGrid cartesian(double spacing, double kappa_max);
  static DirectionGrid general(std::vector<Vec2> nodes,
                               std::vector<double> weights, double kappa_max);
};

}  // namespace polx
