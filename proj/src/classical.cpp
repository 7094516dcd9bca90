#include "ktop/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ktop {

namespace {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 as_vec(SpherePoint p) { return {p.x, p.y, p.z}; }

// Jacobian of classical_step (before renormalization) applied to v.
Vec3 apply_jacobian(SpherePoint p, double k, const Vec3& v) {
  // after the quarter turn
  const double x = p.z;
  const double y = p.y;
  const double z = -p.x;
  const Vec3 rv{v[2], v[1], -v[0]};
  const double c = std::cos(k * z);
  const double s = std::sin(k * z);
  return {c * rv[0] - s * rv[1] - k * (x * s + y * c) * rv[2],
          s * rv[0] + c * rv[1] + k * (x * c - y * s) * rv[2], rv[2]};
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SpherePoint SpherePoint::from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double SpherePoint::theta() const { return std::acos(std::clamp(z / norm(), -1.0, 1.0)); }

double SpherePoint::phi() const {
  const double a = std::atan2(y, x);
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}

double SpherePoint::norm() const { return std::sqrt(x * x + y * y + z * z); }

SpherePoint classical_step(SpherePoint p, double k) {
  const double x = p.z;
  const double y = p.y;
  const double z = -p.x;
  const double c = std::cos(k * z);
  const double s = std::sin(k * z);
  SpherePoint out{c * x - s * y, s * x + c * y, z};
  const double n = out.norm();
  out.x /= n;
  out.y /= n;
  out.z /= n;
  return out;
}

std::array<std::array<double, 3>, 2> tangent_frame(SpherePoint p) {
  const Vec3 r = as_vec(p);
  // helper axis: the coordinate axis least aligned with p
  std::size_t axis = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(r[i]) < std::abs(r[axis])) axis = i;
  Vec3 e1{0.0, 0.0, 0.0};
  e1[axis] = 1.0;
  const double proj = dot(e1, r);
  for (std::size_t i = 0; i < 3; ++i) e1[i] -= proj * r[i];
  const double n = std::sqrt(dot(e1, e1));
  for (double& c : e1) c /= n;
  return {e1, cross(r, e1)};
}

TangentMap tangent_map(SpherePoint p, double k) {
  const auto from = tangent_frame(p);
  const auto to = tangent_frame(classical_step(p, k));
  TangentMap m{};
  for (std::size_t b = 0; b < 2; ++b) {
    const Vec3 image = apply_jacobian(p, k, from[b]);
    for (std::size_t a = 0; a < 2; ++a) m[a * 2 + b] = dot(to[a], image);
  }
  return m;
}

LyapunovEstimate lyapunov(SpherePoint p, double k, int steps, int renorm_interval) {
  if (steps < 1000) throw std::invalid_argument("lyapunov: need at least 1000 steps");
  if (renorm_interval < 1) throw std::invalid_argument("lyapunov: renorm interval must be >= 1");
  constexpr int kTransient = 100;

  double v0 = std::numbers::sqrt2 / 2.0;
  double v1 = std::numbers::sqrt2 / 2.0;
  auto advance = [&] {
    const TangentMap m = tangent_map(p, k);
    const double a = m[0] * v0 + m[1] * v1;
    const double b = m[2] * v0 + m[3] * v1;
    v0 = a;
    v1 = b;
    p = classical_step(p, k);
  };
  auto renormalize = [&] {
    const double n = std::hypot(v0, v1);
    v0 /= n;
    v1 /= n;
    return std::log(n);
  };

  for (int i = 0; i < kTransient; ++i) {
    advance();
    renormalize();
  }
  double sum = 0.0;
  for (int i = 1; i <= steps; ++i) {
    advance();
    if (i % renorm_interval == 0 || i == steps) sum += renormalize();
  }
  return {sum / steps, steps, kTransient};
}

std::vector<RegimeStats> regime_scan(std::span<const double> k_grid,
                                     const RegimeScanOptions& options) {
  if (k_grid.empty()) throw std::invalid_argument("regime_scan: empty k grid");
  if (options.samples < 1) throw std::invalid_argument("regime_scan: need at least one sample");
  std::mt19937_64 rng(options.seed);
  std::vector<SpherePoint> points;
  for (int i = 0; i < options.samples; ++i) {
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    points.push_back(SpherePoint::from_angles(std::acos(z), phi));
  }

  std::vector<RegimeStats> out;
  for (double k : k_grid) {
    RegimeStats stats;
    stats.k = k;
    stats.samples = options.samples;
    stats.max_lambda = -std::numeric_limits<double>::infinity();
    int chaotic = 0;
    for (const SpherePoint& p : points) {
      const double lambda = lyapunov(p, k, options.steps).lambda;
      stats.mean_lambda += lambda;
      stats.max_lambda = std::max(stats.max_lambda, lambda);
      if (lambda > options.chaotic_threshold) ++chaotic;
    }
    stats.mean_lambda /= options.samples;
    stats.chaotic_fraction = static_cast<double>(chaotic) / options.samples;
    out.push_back(stats);
  }
  return out;
}

const char* regime_label(const RegimeStats& stats) {
  if (stats.chaotic_fraction <= 0.0) return "regular";
  if (stats.chaotic_fraction < 0.9) return "weakly_chaotic";
  return "strongly_chaotic";
}

std::vector<SpherePoint> spiral_points(int n) {
  std::vector<SpherePoint> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double phi = std::fmod(i * golden, 2.0 * std::numbers::pi);
    out.push_back(SpherePoint::from_angles(std::acos(z), phi));
  }
  return out;
}

std::vector<SpherePoint> pick_chaotic_sea(std::span<const SpherePoint> candidates,
                                          std::span<const double> k_grid, int count,
                                          double threshold, int steps) {
  std::vector<SpherePoint> out;
  for (const SpherePoint& p : candidates) {
    if (static_cast<int>(out.size()) >= count) break;
    const bool chaotic = std::all_of(k_grid.begin(), k_grid.end(), [&](double k) {
      return lyapunov(p, k, steps).lambda > threshold;
    });
    if (chaotic) out.push_back(p);
  }
  return out;
}

}  // namespace ktop
