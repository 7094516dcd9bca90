#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ktop {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Raised when a computed quantity breaks an invariant it must satisfy
/// (norm drift, non-Hermitian residue, negative density eigenvalues).
class NumericalInvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spin magnitude j, stored as the integer 2j so half-integers are exact.
class SpinQuantum {
 public:
  /// Throws std::invalid_argument unless 2j is a nonnegative integer.
  static SpinQuantum from_j(double j);
  static SpinQuantum from_twice(int two_j);

  double j() const { return 0.5 * two_j_; }
  int two_j() const { return two_j_; }
  Index dim() const { return two_j_ + 1; }

  /// Magnetic quantum number of basis index i (m ascending from -j).
  double m(Index i) const { return static_cast<double>(i) - j(); }

  friend bool operator==(SpinQuantum, SpinQuantum) = default;

 private:
  explicit SpinQuantum(int two_j) : two_j_(two_j) {}
  int two_j_;
};

/// Dense Jx, Jy, Jz in the |j,m> basis, m ascending, hbar = 1.
struct SpinOperators {
  SpinQuantum spin;
  CMatrix jx;
  CMatrix jy;
  CMatrix jz;
};

SpinOperators build_operators(SpinQuantum spin);

/// Normalized single-top state vector.
class SubsystemState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws std::invalid_argument if |norm - 1| exceeds kNormTolerance.
  explicit SubsystemState(CVector amplitudes);

  /// Rescales to unit norm; throws on a zero vector.
  static SubsystemState normalized(CVector amplitudes);

  const CVector& amplitudes() const { return amplitudes_; }
  Index dim() const { return amplitudes_.size(); }

 private:
  CVector amplitudes_;
};

/// Spin coherent state |theta,phi> = exp(i theta (Jx sin phi - Jy cos phi)) |j,j>.
///
/// <J> points along (sin theta cos phi, sin theta sin phi, cos theta). The
/// amplitudes are evaluated from the closed-form binomial expansion, with the
/// global phase fixed so that the |j,j> component is real and nonnegative.
SubsystemState coherent_state(SpinQuantum spin, double theta, double phi);

/// Real-valued <state|op|state>. Throws std::invalid_argument on dimension
/// mismatch and NumericalInvariantError when the imaginary residue exceeds
/// 1e-10 (relative to the magnitude of the real part, floor 1).
double expectation(const CMatrix& op, const SubsystemState& state);

}  // namespace ktop
