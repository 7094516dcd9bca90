#include "ktop/floquet.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ktop {

namespace {

std::mutex g_rotation_mutex;
std::map<int, CMatrix> g_rotation_cache;

CMatrix compute_quarter_turn_y(SpinQuantum spin) {
  const SpinOperators ops = build_operators(spin);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(ops.jy);
  if (eig.info() != Eigen::Success) {
    throw NumericalInvariantError("eigendecomposition of Jy failed");
  }
  const Eigen::VectorXd& w = eig.eigenvalues();
  CVector phases(w.size());
  for (Index i = 0; i < w.size(); ++i) phases[i] = std::polar(1.0, -0.5 * std::numbers::pi * w[i]);
  const CMatrix& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

}  // namespace

const CMatrix& quarter_turn_y(SpinQuantum spin) {
  std::lock_guard lock(g_rotation_mutex);
  auto it = g_rotation_cache.find(spin.two_j());
  if (it == g_rotation_cache.end()) {
    it = g_rotation_cache.emplace(spin.two_j(), compute_quarter_turn_y(spin)).first;
  }
  return it->second;
}

SingleTopFloquet build_single_top(SpinQuantum spin, double k) {
  const CMatrix& rotation = quarter_turn_y(spin);
  const Index d = spin.dim();
  const double j = spin.j();
  CVector kick(d);
  for (Index i = 0; i < d; ++i) {
    const double m = spin.m(i);
    // j = 0 has only m = 0, where the twist is the identity
    kick[i] = j > 0.0 ? std::polar(1.0, -k * m * m / (2.0 * j)) : Complex(1.0);
  }
  return {spin, k, kick.asDiagonal() * rotation};
}

CoupledState::CoupledState(Index dim1, Index dim2) : grid_(CMatrix::Zero(dim1, dim2)) {}

CoupledState::CoupledState(CMatrix grid) : grid_(std::move(grid)) {}

CoupledState CoupledState::product(const SubsystemState& first, const SubsystemState& second) {
  return CoupledState(first.amplitudes() * second.amplitudes().transpose());
}

CoupledState CoupledState::from_kronecker(const CVector& amplitudes, Index dim1, Index dim2) {
  if (amplitudes.size() != dim1 * dim2) {
    throw std::invalid_argument("Kronecker vector length does not match dim1 * dim2");
  }
  CMatrix grid(dim1, dim2);
  for (Index a = 0; a < dim1; ++a)
    for (Index b = 0; b < dim2; ++b) grid(a, b) = amplitudes[a * dim2 + b];
  return CoupledState(std::move(grid));
}

CVector CoupledState::to_kronecker() const {
  CVector out(dim1() * dim2());
  for (Index a = 0; a < dim1(); ++a)
    for (Index b = 0; b < dim2(); ++b) out[a * dim2() + b] = grid_(a, b);
  return out;
}

StructuredFloquet build_coupled(SingleTopFloquet top1, SingleTopFloquet top2, double epsilon) {
  const SpinQuantum s1 = top1.spin;
  const SpinQuantum s2 = top2.spin;
  const double j = s1.j();
  CMatrix phase(s1.dim(), s2.dim());
  for (Index a = 0; a < s1.dim(); ++a) {
    for (Index b = 0; b < s2.dim(); ++b) {
      phase(a, b) = (epsilon == 0.0 || j == 0.0)
                        ? Complex(1.0)
                        : std::polar(1.0, -epsilon * s1.m(a) * s2.m(b) / j);
    }
  }
  return {std::move(top1), std::move(top2), std::move(phase), epsilon};
}

StructuredFloquet build_coupled(SpinQuantum spin, double k1, double k2, double epsilon) {
  return build_coupled(build_single_top(spin, k1), build_single_top(spin, k2), epsilon);
}

void step_in_place(CoupledState& state, const StructuredFloquet& map) {
  CMatrix& a = state.grid();
  if (a.rows() != map.top1.u.rows() || a.cols() != map.top2.u.rows()) {
    throw std::invalid_argument("coupled state dimensions do not match the Floquet map");
  }
  // (u1 (x) u2) psi  <=>  u1 A u2^T on the grid
  CMatrix half;
  half.noalias() = map.top1.u * a;
  a.noalias() = half * map.top2.u.transpose();
  a.array() *= map.coupling_phase.array();
}

CoupledState step(CoupledState state, const StructuredFloquet& map) {
  step_in_place(state, map);
  return state;
}

CoupledState evolve(CoupledState initial, const StructuredFloquet& map, int steps,
                    const StepObserver& observer, EvolveOptions options) {
  if (steps < 0) throw std::invalid_argument("evolve: steps must be nonnegative");
  for (int t = 1; t <= steps; ++t) {
    step_in_place(initial, map);
    const double drift = std::abs(initial.norm() - 1.0);
    if (!(drift <= options.norm_tolerance)) {
      throw NumericalInvariantError("norm drift " + std::to_string(drift) + " at step " +
                                    std::to_string(t));
    }
    if (observer) observer(t, initial);
  }
  return initial;
}

}  // namespace ktop
