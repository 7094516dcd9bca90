#include "ktop/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace ktop {

namespace {

// Returns (P_n(x), P_n'(x)) via the three-term recurrence.
std::pair<double, double> legendre_with_derivative(std::size_t n, double x) {
  double p_prev = 1.0;
  double p = x;
  for (std::size_t l = 2; l <= n; ++l) {
    const double dl = static_cast<double>(l);
    const double next = ((2.0 * dl - 1.0) * x * p - (dl - 1.0) * p_prev) / dl;
    p_prev = p;
    p = next;
  }
  const double dn = static_cast<double>(n);
  return {p, dn * (x * p - p_prev) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  if (n == 1) return {{0.0}, {2.0}};
  GaussLegendre rule{std::vector<double>(n), std::vector<double>(n)};
  const double dn = static_cast<double>(n);

  // roots come in +-x pairs; Newton from the asymptotic initial guess
  for (std::size_t i = 0; i < n / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    const double dp = legendre_with_derivative(n, 0.0).second;
    rule.nodes[n / 2] = 0.0;
    rule.weights[n / 2] = 2.0 / (dp * dp);
  }
  return rule;
}

SphereGrid sphere_grid(std::size_t n_theta, std::size_t n_phi) {
  if (n_theta < 2 || n_phi < 2) {
    throw std::invalid_argument("sphere grid needs at least 2 nodes per axis");
  }
  const GaussLegendre rule = gauss_legendre(n_theta);
  SphereGrid grid;
  grid.theta.resize(n_theta);
  grid.theta_weight.resize(n_theta);
  // rule.nodes ascend in cos(theta); reverse so theta ascends
  for (std::size_t i = 0; i < n_theta; ++i) {
    const std::size_t src = n_theta - 1 - i;
    grid.theta[i] = std::acos(rule.nodes[src]);
    grid.theta_weight[i] = rule.weights[src];
  }
  grid.phi.resize(n_phi);
  for (std::size_t i = 0; i < n_phi; ++i) {
    grid.phi[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_phi);
  }
  grid.phi_weight = 2.0 * std::numbers::pi / static_cast<double>(n_phi);
  return grid;
}

}  // namespace ktop
