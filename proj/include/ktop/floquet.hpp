#pragma once

#include <functional>

#include "ktop/spin.hpp"

namespace ktop {

/// One kick period of a single top:
///   u = exp(-i k Jz^2 / (2j)) exp(-i (pi/2) Jy)
/// i.e. a free quarter turn about y followed by the nonlinear twist.
struct SingleTopFloquet {
  SpinQuantum spin;
  double k;
  CMatrix u;
};

/// exp(-i (pi/2) Jy) from a Hermitian eigendecomposition of Jy. Cached per
/// spin value; the returned reference stays valid for the program lifetime.
const CMatrix& quarter_turn_y(SpinQuantum spin);

SingleTopFloquet build_single_top(SpinQuantum spin, double k);

/// Pure state of the two-top system stored as a dim1 x dim2 amplitude grid,
/// grid(i1, i2) = <m1, m2|psi>.
class CoupledState {
 public:
  CoupledState(Index dim1, Index dim2);
  explicit CoupledState(CMatrix grid);

  static CoupledState product(const SubsystemState& first, const SubsystemState& second);

  /// Kronecker-ordered amplitudes: index i1 * dim2 + i2.
  static CoupledState from_kronecker(const CVector& amplitudes, Index dim1, Index dim2);
  CVector to_kronecker() const;

  const CMatrix& grid() const { return grid_; }
  CMatrix& grid() { return grid_; }
  Index dim1() const { return grid_.rows(); }
  Index dim2() const { return grid_.cols(); }
  double norm() const { return grid_.norm(); }

 private:
  CMatrix grid_;
};

/// One period of the coupled map without forming the (dim1 dim2)^2 unitary:
/// both single-top maps followed by the diagonal coupling kick
/// exp(-i eps Jz1 Jz2 / j), which commutes with the nonlinear kicks.
struct StructuredFloquet {
  SingleTopFloquet top1;
  SingleTopFloquet top2;
  /// coupling_phase(i1, i2) = exp(-i eps m1 m2 / j), j of the first top
  CMatrix coupling_phase;
  double epsilon;
};

StructuredFloquet build_coupled(SpinQuantum spin, double k1, double k2, double epsilon);
StructuredFloquet build_coupled(SingleTopFloquet top1, SingleTopFloquet top2, double epsilon);

/// A <- coupling_phase o (u1 A u2^T), in place.
void step_in_place(CoupledState& state, const StructuredFloquet& map);

CoupledState step(CoupledState state, const StructuredFloquet& map);

using StepObserver = std::function<void(int t, const CoupledState& state)>;

struct EvolveOptions {
  /// Largest tolerated |norm - 1| after any step before evolution aborts
  /// with NumericalInvariantError.
  double norm_tolerance = 1e-10;
};

/// Applies `steps` periods; the observer sees t = 1..steps after each one.
CoupledState evolve(CoupledState initial, const StructuredFloquet& map, int steps,
                    const StepObserver& observer = {}, EvolveOptions options = {});

}  // namespace ktop
