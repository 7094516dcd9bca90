#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace ktop {

/// Point on the unit sphere, the classical limit of J / j.
struct SpherePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  /// (sin theta cos phi, sin theta sin phi, cos theta)
  static SpherePoint from_angles(double theta, double phi);
  double theta() const;
  double phi() const;
  double norm() const;
};

/// Classical kicked-top period, same ordering as the quantum map: quarter
/// turn about y, (x, y, z) -> (z, y, -x), then a twist about z by angle k z.
SpherePoint classical_step(SpherePoint p, double k);

/// Linearized map between local orthonormal tangent frames at p and at
/// classical_step(p, k). Row-major 2x2; its determinant is 1.
using TangentMap = std::array<double, 4>;
TangentMap tangent_map(SpherePoint p, double k);

/// Orthonormal basis (e1, e2) of the tangent plane at p, chosen
/// deterministically from p alone.
std::array<std::array<double, 3>, 2> tangent_frame(SpherePoint p);

struct LyapunovEstimate {
  double lambda = 0.0;  // nats per step
  int steps_used = 0;
  int transient_discarded = 0;
};

/// Largest Lyapunov exponent by the Benettin scheme on the tangent map,
/// renormalizing every `renorm_interval` steps after a 100-step transient.
/// Throws std::invalid_argument for steps < 1000.
LyapunovEstimate lyapunov(SpherePoint p, double k, int steps, int renorm_interval = 1);

struct RegimeStats {
  double k = 0.0;
  double mean_lambda = 0.0;
  double max_lambda = 0.0;
  double chaotic_fraction = 0.0;  // share of samples with lambda > threshold
  int samples = 0;
};

struct RegimeScanOptions {
  int samples = 32;
  int steps = 1000;
  double chaotic_threshold = 0.1;
  std::uint64_t seed = 1;
};

/// Lyapunov statistics over seeded random sphere points; the same points are
/// reused for every k so the grid entries are directly comparable.
std::vector<RegimeStats> regime_scan(std::span<const double> k_grid,
                                     const RegimeScanOptions& options = {});

/// "regular", "weakly_chaotic" or "strongly_chaotic" from the chaotic fraction
/// (0, in (0, 0.9), >= 0.9).
const char* regime_label(const RegimeStats& stats);

/// Points of the golden-angle spiral with n points, from north to south pole.
std::vector<SpherePoint> spiral_points(int n);

/// First `count` candidates whose Lyapunov exponent over `steps` exceeds
/// `threshold` for every k in `k_grid`. Returns fewer if the candidates run out.
std::vector<SpherePoint> pick_chaotic_sea(std::span<const SpherePoint> candidates,
                                          std::span<const double> k_grid, int count,
                                          double threshold = 0.1, int steps = 1000);

}  // namespace ktop
