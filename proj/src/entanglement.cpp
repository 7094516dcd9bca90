#include "ktop/entanglement.hpp"

#include <cmath>
#include <numbers>

namespace ktop {

ReducedDensity reduce_first(const CoupledState& state) {
  const CMatrix& a = state.grid();
  ReducedDensity out{CMatrix(a.rows(), a.rows())};
  out.rho.noalias() = a * a.adjoint();
  return out;
}

ReducedDensity reduce_second(const CoupledState& state) {
  const CMatrix& a = state.grid();
  ReducedDensity out{CMatrix(a.cols(), a.cols())};
  out.rho.noalias() = a.transpose() * a.conjugate();
  return out;
}

double von_neumann(const ReducedDensity& density) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(density.rho, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalInvariantError("eigendecomposition of reduced density failed");
  }
  double s = 0.0;
  for (double lambda : eig.eigenvalues()) {
    if (lambda < -1e-8) {
      throw NumericalInvariantError("reduced density has eigenvalue " + std::to_string(lambda));
    }
    lambda = std::clamp(lambda, 0.0, 1.0);
    if (lambda > 0.0) s -= lambda * std::log(lambda);
  }
  return s;
}

double linear_entropy(const ReducedDensity& density) {
  return 1.0 - density.rho.squaredNorm();
}

double linear_entropy(const CoupledState& state) {
  const double direct = linear_entropy(reduce_first(state));
  if (direct > kSchmidtThreshold) return direct;
  const Eigen::VectorXd sigma = Eigen::BDCSVD<CMatrix>(state.grid()).singularValues();
  const Eigen::VectorXd p = sigma.array().square() / sigma.squaredNorm();
  // suffix[i] = sum_{j >= i} p_j, accumulated from the smallest weights up
  Eigen::VectorXd suffix(p.size() + 1);
  suffix[p.size()] = 0.0;
  for (Index i = p.size() - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + p[i];
  double prefix = 0.0;
  double s = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    s += p[i] * (prefix + suffix[i + 1]);
    prefix += p[i];
  }
  return s;
}

double HusimiGrid::normalization() const {
  double sum = 0.0;
  for (Index it = 0; it < q.rows(); ++it) {
    sum += grid.weight(static_cast<std::size_t>(it)) * q.row(it).sum();
  }
  return static_cast<double>(dim) / (4.0 * std::numbers::pi) * sum;
}

double HusimiGrid::area_fraction_above(double threshold) const {
  double area = 0.0;
  for (Index it = 0; it < q.rows(); ++it) {
    const auto above = (q.row(it).array() > threshold).count();
    area += grid.weight(static_cast<std::size_t>(it)) * static_cast<double>(above);
  }
  return area / (4.0 * std::numbers::pi);
}

HusimiGrid husimi(const ReducedDensity& density, int n_theta, int n_phi) {
  const Index d = density.rho.rows();
  const SpinQuantum spin = SpinQuantum::from_twice(static_cast<int>(d) - 1);
  HusimiGrid out{sphere_grid(static_cast<std::size_t>(n_theta), static_cast<std::size_t>(n_phi)),
                 Eigen::MatrixXd(n_theta, n_phi), static_cast<int>(d)};

  // With <m|theta phi> = b_m(theta) e^{i (j-m) phi} and real b,
  //   q = sum_{m,m'} b_m b_m' rho_mm' e^{i (m-m') phi} = sum_delta f_delta e^{i delta phi},
  // and f_{-delta} = conj(f_delta), so only delta >= 0 is accumulated.
  CVector f(d);
  for (int it = 0; it < n_theta; ++it) {
    const CVector b = coherent_state(spin, out.grid.theta[static_cast<std::size_t>(it)], 0.0)
                          .amplitudes();
    f.setZero();
    for (Index delta = 0; delta < d; ++delta) {
      Complex acc = 0.0;
      for (Index i = delta; i < d; ++i) acc += b[i].real() * b[i - delta].real() * density.rho(i, i - delta);
      f[delta] = acc;
    }
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = out.grid.phi[static_cast<std::size_t>(ip)];
      double value = f[0].real();
      for (Index delta = 1; delta < d; ++delta) {
        value += 2.0 * (f[delta] * std::polar(1.0, static_cast<double>(delta) * phi)).real();
      }
      out.q(it, ip) = value;
    }
  }
  return out;
}

EntropySample measure(int t, const CoupledState& state, SpinQuantum spin1, bool with_von_neumann) {
  const ReducedDensity rho = reduce_first(state);
  EntropySample s;
  s.t = t;
  s.s_lin = linear_entropy(rho);
  if (s.s_lin <= kSchmidtThreshold) s.s_lin = linear_entropy(state);
  if (with_von_neumann) s.s_vn = von_neumann(rho);
  const double j = spin1.j();
  if (j > 0.0) {
    double mean = 0.0;
    double second = 0.0;
    for (Index i = 0; i < rho.rho.rows(); ++i) {
      const double p = rho.rho(i, i).real();
      const double m = spin1.m(i);
      mean += p * m;
      second += p * m * m;
    }
    s.jz_mean = mean / j;
    s.jz2_mean = second / (j * j);
  }
  return s;
}

EntropySeries entropy_series(const CoupledState& initial, const StructuredFloquet& map, int steps,
                             bool with_von_neumann) {
  const SpinQuantum spin1 = map.top1.spin;
  EntropySeries series;
  series.s0 = 2.0 * map.epsilon * map.epsilon * spin1.j() * spin1.j();
  series.subsystem_dim = static_cast<int>(spin1.dim());
  series.samples.reserve(static_cast<std::size_t>(steps) + 1);
  series.samples.push_back(measure(0, initial, spin1, with_von_neumann));
  evolve(initial, map, steps, [&](int t, const CoupledState& state) {
    series.samples.push_back(measure(t, state, spin1, with_von_neumann));
  });
  return series;
}

}  // namespace ktop
