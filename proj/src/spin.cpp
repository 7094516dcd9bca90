#include "ktop/spin.hpp"

#include <cmath>
#include <numbers>

namespace ktop {

SpinQuantum SpinQuantum::from_j(double j) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (!std::isfinite(j) || rounded < 0.0 || std::abs(twice - rounded) > 1e-12) {
    throw std::invalid_argument("spin j must be a nonnegative half-integer, got " +
                                std::to_string(j));
  }
  return SpinQuantum(static_cast<int>(rounded));
}

SpinQuantum SpinQuantum::from_twice(int two_j) {
  if (two_j < 0) {
    throw std::invalid_argument("2j must be nonnegative, got " + std::to_string(two_j));
  }
  return SpinQuantum(two_j);
}

SpinOperators build_operators(SpinQuantum spin) {
  const Index d = spin.dim();
  const double j = spin.j();

  // raising[i+1, i] = <m+1|J+|m>
  Eigen::MatrixXd raising = Eigen::MatrixXd::Zero(d, d);
  for (Index i = 0; i + 1 < d; ++i) {
    const double m = spin.m(i);
    raising(i + 1, i) = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  }
  const Eigen::MatrixXd lowering = raising.transpose();

  SpinOperators ops{spin, CMatrix(d, d), CMatrix(d, d), CMatrix::Zero(d, d)};
  ops.jx = (0.5 * (raising + lowering)).cast<Complex>();
  ops.jy = (raising - lowering).cast<Complex>() * Complex(0.0, -0.5);
  for (Index i = 0; i < d; ++i) ops.jz(i, i) = spin.m(i);
  return ops;
}

SubsystemState::SubsystemState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  const double drift = std::abs(amplitudes_.norm() - 1.0);
  if (!(drift <= kNormTolerance)) {
    throw std::invalid_argument("subsystem state is not normalized (|norm-1| = " +
                                std::to_string(drift) + ")");
  }
}

SubsystemState SubsystemState::normalized(CVector amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
  amplitudes /= n;
  return SubsystemState(std::move(amplitudes));
}

SubsystemState coherent_state(SpinQuantum spin, double theta, double phi) {
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw std::invalid_argument("coherent state needs 0 <= theta <= pi");
  }
  const Index d = spin.dim();
  const int two_j = spin.two_j();
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const double log_fact_2j = std::lgamma(two_j + 1.0);

  CVector a(d);
  for (Index i = 0; i < d; ++i) {
    // i = j + m, 2j - i = j - m
    const double up = static_cast<double>(i);
    const double down = static_cast<double>(two_j - i);
    const double log_binom = log_fact_2j - std::lgamma(up + 1.0) - std::lgamma(down + 1.0);
    const double magnitude = std::exp(0.5 * log_binom) * std::pow(c, up) * std::pow(s, down);
    a[i] = std::polar(magnitude, down * phi);
  }
  return SubsystemState::normalized(std::move(a));
}

double expectation(const CMatrix& op, const SubsystemState& state) {
  const CVector& v = state.amplitudes();
  if (op.rows() != v.size() || op.cols() != v.size()) {
    throw std::invalid_argument("expectation: operator is " + std::to_string(op.rows()) + "x" +
                                std::to_string(op.cols()) + ", state has dimension " +
                                std::to_string(v.size()));
  }
  const Complex value = v.dot(op * v);
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw NumericalInvariantError("expectation value has imaginary residue " +
                                  std::to_string(value.imag()));
  }
  return value.real();
}

}  // namespace ktop
