#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "ktop/entanglement.hpp"
#include "ktop/floquet.hpp"
#include "support/oracles.hpp"

using namespace ktop;

namespace {

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

CoupledState random_coupled(Index d1, Index d2, std::mt19937_64& rng) {
  return CoupledState::from_kronecker(oracle::random_state(d1 * d2, rng), d1, d2);
}

}  // namespace

TEST_CASE("k = 0 single top is a quarter turn with period four") {
  const auto top = build_single_top(SpinQuantum::from_j(1), 0.0);
  const CMatrix u4 = top.u * top.u * top.u * top.u;
  CHECK(max_abs(u4 - CMatrix::Identity(3, 3)) < 1e-13);
}

TEST_CASE("single-top unitary is unitary at j = 80") {
  const auto top = build_single_top(SpinQuantum::from_j(80), 7.0);
  CHECK(max_abs(top.u.adjoint() * top.u - CMatrix::Identity(161, 161)) < 1e-12);
}

TEST_CASE("single-top unitary matches the Taylor-series oracle") {
  for (double j : {0.5, 1.0, 2.0, 5.5}) {
    for (double k : {0.0, 1.0, 7.0}) {
      CAPTURE(j);
      CAPTURE(k);
      const auto top = build_single_top(SpinQuantum::from_j(j), k);
      CHECK(max_abs(top.u - oracle::single_top_unitary(j, k)) < 1e-10);
    }
  }
}

TEST_CASE("coupling phase table") {
  const SpinQuantum spin = SpinQuantum::from_j(80);
  const auto free_map = build_coupled(spin, 7.0, 7.0, 0.0);
  CHECK(free_map.coupling_phase == CMatrix::Ones(161, 161));

  const auto map = build_coupled(spin, 7.0, 7.0, 1e-4);
  // m1 = m2 = 80 at the last index
  const Complex expected = std::exp(Complex(0.0, -8e-3));
  CHECK(std::abs(map.coupling_phase(160, 160) - expected) < 1e-15);
  CHECK(std::abs(map.coupling_phase(80, 37) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(map.coupling_phase(0, 160) - std::exp(Complex(0.0, 8e-3))) < 1e-15);
}

TEST_CASE("structured step equals the Kronecker oracle for j <= 2") {
  std::mt19937_64 rng(11);
  for (double j : {0.5, 1.0, 1.5, 2.0}) {
    for (double eps : {0.0, 1e-2, 0.7}) {
      CAPTURE(j);
      CAPTURE(eps);
      const SpinQuantum spin = SpinQuantum::from_j(j);
      const auto map = build_coupled(spin, 7.0, 3.0, eps);
      const CMatrix big = oracle::coupled_unitary(j, 7.0, 3.0, eps);
      const CoupledState psi = random_coupled(spin.dim(), spin.dim(), rng);
      const CVector expected = big * psi.to_kronecker();
      CHECK((step(psi, map).to_kronecker() - expected).norm() < 1e-10);
    }
  }
}

TEST_CASE("kronecker round trip") {
  std::mt19937_64 rng(3);
  const CVector v = oracle::random_state(12, rng);
  const auto state = CoupledState::from_kronecker(v, 3, 4);
  CHECK(state.grid()(1, 2) == v[1 * 4 + 2]);
  CHECK(state.to_kronecker() == v);
  CHECK_THROWS_AS(CoupledState::from_kronecker(v, 5, 4), std::invalid_argument);
}

TEST_CASE("coupling kick commutes with the nonlinear kicks") {
  const double j = 1.5;
  const auto s = oracle::naive_spin(j);
  const CMatrix id = CMatrix::Identity(s.jz.rows(), s.jz.cols());
  const CMatrix coupling = oracle::expm(Complex(0.0, -0.3 / j) * oracle::kron(s.jz, s.jz));
  const CMatrix twist1 = oracle::kron(oracle::expm(Complex(0.0, -7.0 / (2 * j)) * s.jz * s.jz), id);
  const CMatrix twist2 = oracle::kron(id, oracle::expm(Complex(0.0, -2.0 / (2 * j)) * s.jz * s.jz));
  CHECK(max_abs(coupling * twist1 - twist1 * coupling) < 1e-12);
  CHECK(max_abs(coupling * twist2 - twist2 * coupling) < 1e-12);
}

TEST_CASE("norm is conserved over 10^4 steps") {
  const SpinQuantum spin = SpinQuantum::from_j(10);
  const auto map = build_coupled(spin, 7.0, 7.0, 1e-2);
  const auto psi = CoupledState::product(coherent_state(spin, 0.89, 0.63), coherent_state(spin, 0.89, 0.63));
  double worst = 0.0;
  const auto final_state = evolve(psi, map, 10000, [&](int, const CoupledState& s) {
    worst = std::max(worst, std::abs(s.norm() - 1.0));
  });
  CHECK(worst < 1e-9);
  CHECK(std::abs(final_state.norm() - 1.0) < 1e-9);
}

TEST_CASE("uncoupled evolution keeps a product state") {
  const SpinQuantum spin = SpinQuantum::from_j(20);
  const auto map = build_coupled(spin, 7.0, 7.0, 0.0);
  const auto psi = CoupledState::product(coherent_state(spin, 0.89, 0.63), coherent_state(spin, 1.3, -0.2));
  const auto out = evolve(psi, map, 50);
  Eigen::JacobiSVD<CMatrix> svd(out.grid());
  const auto& sv = svd.singularValues();
  CHECK(sv[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sv.tail(sv.size() - 1).norm() < 1e-10);
  CHECK(linear_entropy(reduce_first(out)) < 1e-20);
}

TEST_CASE("evolve with zero steps and observer indices") {
  const SpinQuantum spin = SpinQuantum::from_j(2);
  const auto map = build_coupled(spin, 7.0, 7.0, 1e-2);
  std::mt19937_64 rng(5);
  const auto psi = random_coupled(5, 5, rng);
  CHECK(evolve(psi, map, 0).grid() == psi.grid());

  std::vector<int> seen;
  evolve(psi, map, 4, [&](int t, const CoupledState&) { seen.push_back(t); });
  CHECK(seen == std::vector<int>{1, 2, 3, 4});
  CHECK_THROWS_AS(evolve(psi, map, -1), std::invalid_argument);
}

TEST_CASE("evolve rejects a state that is not normalized") {
  const SpinQuantum spin = SpinQuantum::from_j(1);
  const auto map = build_coupled(spin, 7.0, 7.0, 1e-2);
  CoupledState bad(CMatrix::Ones(3, 3));
  CHECK_THROWS_AS(evolve(bad, map, 1), NumericalInvariantError);
}

TEST_CASE("coupled map with unequal spins") {
  const auto top1 = build_single_top(SpinQuantum::from_j(1), 2.0);
  const auto top2 = build_single_top(SpinQuantum::from_j(0.5), 2.0);
  const auto map = build_coupled(top1, top2, 0.3);
  CHECK(map.coupling_phase.rows() == 3);
  CHECK(map.coupling_phase.cols() == 2);
  std::mt19937_64 rng(9);
  const auto psi = random_coupled(3, 2, rng);
  CHECK(std::abs(step(psi, map).norm() - 1.0) < 1e-13);
}

TEST_CASE("one hundred steps at j = 80 run quickly") {
  const SpinQuantum spin = SpinQuantum::from_j(80);
  const auto map = build_coupled(spin, 7.0, 7.0, 1e-4);
  const auto psi = CoupledState::product(coherent_state(spin, 0.89, 0.63), coherent_state(spin, 0.89, 0.63));
  const auto start = std::chrono::steady_clock::now();
  const auto out = evolve(psi, map, 100);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  MESSAGE("100 steps at j = 80: " << seconds << " s");
  CHECK(std::abs(out.norm() - 1.0) < 1e-10);
  CHECK(seconds < 10.0);
}
