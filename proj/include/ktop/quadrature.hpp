#pragma once

#include <cstddef>
#include <vector>

namespace ktop {

/// Gauss-Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
struct GaussLegendre {
  std::vector<double> nodes;    // ascending
  std::vector<double> weights;  // sum to 2
};

GaussLegendre gauss_legendre(std::size_t n);

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times a
/// uniform periodic grid in phi. Weights integrate dOmega, so they sum to 4 pi.
struct SphereGrid {
  std::vector<double> theta;         // ascending in theta (descending cos theta)
  std::vector<double> theta_weight;  // Gauss-Legendre weight of cos(theta)
  std::vector<double> phi;           // 2 pi i / n_phi
  double phi_weight = 0.0;           // 2 pi / n_phi

  /// Solid-angle weight of any node in theta row `it`.
  double weight(std::size_t it) const { return theta_weight[it] * phi_weight; }
};

SphereGrid sphere_grid(std::size_t n_theta, std::size_t n_phi);

}  // namespace ktop
