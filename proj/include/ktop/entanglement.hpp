#pragma once

#include <vector>

#include "ktop/floquet.hpp"
#include "ktop/quadrature.hpp"
#include "ktop/spin.hpp"

namespace ktop {

/// Reduced density matrix of one subsystem.
struct ReducedDensity {
  CMatrix rho;
};

/// rho = A A^dagger over the second top's index.
ReducedDensity reduce_first(const CoupledState& state);
/// rho = A^T conj(A), tracing out the first top.
ReducedDensity reduce_second(const CoupledState& state);

/// -sum lambda ln lambda in nats over eigenvalues clamped to [0, 1].
/// Throws NumericalInvariantError if an eigenvalue is below -1e-8.
double von_neumann(const ReducedDensity& density);

/// 1 - Tr(rho^2), as 1 - sum |rho_mm'|^2.
double linear_entropy(const ReducedDensity& density);

/// Linear entropy of either subsystem of a pure two-top state. Below
/// kSchmidtThreshold the value is recomputed from the Schmidt weights p_i as
/// sum_i p_i (sum_{j != i} p_j), which avoids the cancellation in
/// 1 - Tr(rho^2) and keeps nearly product states at full relative precision.
double linear_entropy(const CoupledState& state);
inline constexpr double kSchmidtThreshold = 1e-6;

/// Husimi function q(theta, phi) = <theta phi|rho|theta phi> on a sphere grid.
struct HusimiGrid {
  SphereGrid grid;
  Eigen::MatrixXd q;  // n_theta x n_phi
  int dim = 0;        // 2j + 1

  /// (2j+1)/(4 pi) times the quadrature of q; equals 1 on a fine enough grid.
  double normalization() const;
  /// Fraction of the sphere's area where q exceeds `threshold`.
  double area_fraction_above(double threshold) const;
};

/// Evaluates the Husimi function on a Gauss-Legendre x uniform grid.
/// Normalization is exact once n_theta >= j + 1 and n_phi >= 2j + 1.
HusimiGrid husimi(const ReducedDensity& density, int n_theta = 181, int n_phi = 361);

struct EntropySample {
  int t = 0;
  double s_vn = 0.0;
  double s_lin = 0.0;
  /// <Jz>/j and <Jz^2>/j^2 of the first top, used to judge equilibration
  double jz_mean = 0.0;
  double jz2_mean = 0.0;
};

/// Per-step entropies of the first subsystem.
struct EntropySeries {
  std::vector<EntropySample> samples;
  double s0 = 0.0;           // 2 eps^2 j^2
  int subsystem_dim = 0;     // dim of the first top
};

/// Measures one state; s_vn is skipped (left 0) unless `with_von_neumann`.
EntropySample measure(int t, const CoupledState& state, SpinQuantum spin1,
                      bool with_von_neumann = true);

/// Evolves `initial` and records t = 0..steps.
EntropySeries entropy_series(const CoupledState& initial, const StructuredFloquet& map,
                             int steps, bool with_von_neumann = true);

}  // namespace ktop
