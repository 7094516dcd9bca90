#include <doctest.h>

#include <cmath>
#include <numbers>
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

TEST_CASE("product state has a rank-one reduced density") {
  const SpinQuantum spin = SpinQuantum::from_j(3);
  const auto a = coherent_state(spin, 0.4, 1.1);
  const auto psi = CoupledState::product(a, coherent_state(spin, 2.0, -0.3));
  const auto rho = reduce_first(psi);
  CHECK(max_abs(rho.rho - a.amplitudes() * a.amplitudes().adjoint()) < 1e-14);
  CHECK(std::abs(von_neumann(rho)) < 1e-10);
  CHECK(std::abs(linear_entropy(rho)) < 1e-14);
}

TEST_CASE("singlet reduces to the maximally mixed qubit") {
  CMatrix grid(2, 2);
  grid << 0.0, 1.0, -1.0, 0.0;
  const CoupledState singlet(grid / std::sqrt(2.0));
  const auto rho = reduce_first(singlet);
  CHECK(max_abs(rho.rho - 0.5 * CMatrix::Identity(2, 2)) < 1e-15);
  CHECK(von_neumann(rho) == doctest::Approx(std::numbers::ln2).epsilon(1e-13));
  CHECK(linear_entropy(rho) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("partial traces match the brute-force oracle") {
  std::mt19937_64 rng(21);
  for (auto [d1, d2] : {std::pair<Index, Index>{2, 2}, {3, 5}, {7, 4}, {21, 21}}) {
    const auto psi = random_coupled(d1, d2, rng);
    const CVector v = psi.to_kronecker();
    CHECK(max_abs(reduce_first(psi).rho - oracle::partial_trace_second(v, d1, d2)) < 1e-12);
    CHECK(max_abs(reduce_second(psi).rho - oracle::partial_trace_first(v, d1, d2)) < 1e-12);
  }
}

TEST_CASE("entropies of known spectra") {
  // maximally entangled pair of j = 80 tops
  const CoupledState bell(CMatrix::Identity(161, 161) / std::sqrt(161.0));
  const auto rho = reduce_first(bell);
  CHECK(von_neumann(rho) == doctest::Approx(5.081404364984463).epsilon(1e-12));
  CHECK(linear_entropy(rho) == doctest::Approx(1.0 - 1.0 / 161.0).epsilon(1e-13));

  // Schmidt weights 3/4 and 1/4
  CMatrix grid = CMatrix::Zero(3, 3);
  grid(0, 1) = std::sqrt(0.75);
  grid(2, 0) = std::sqrt(0.25);
  const auto skewed = reduce_first(CoupledState(grid));
  CHECK(von_neumann(skewed) == doctest::Approx(0.5623351446188083).epsilon(1e-12));
  CHECK(linear_entropy(skewed) == doctest::Approx(0.375).epsilon(1e-13));
}

TEST_CASE("negative eigenvalues are reported") {
  ReducedDensity corrupt{CMatrix::Identity(2, 2)};
  corrupt.rho(0, 0) = 1.1;
  corrupt.rho(1, 1) = -0.1;
  CHECK_THROWS_AS(von_neumann(corrupt), NumericalInvariantError);
}

TEST_CASE("linear entropy never exceeds von Neumann entropy") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto psi = random_coupled(6, 9, rng);
    const auto rho = reduce_first(psi);
    CHECK(linear_entropy(rho) <= von_neumann(rho) + 1e-12);
  }
  const SpinQuantum spin = SpinQuantum::from_j(10);
  const auto map = build_coupled(spin, 7.0, 7.0, 5e-2);
  const auto initial = CoupledState::product(coherent_state(spin, 0.89, 0.63), coherent_state(spin, 0.89, 0.63));
  const auto series = entropy_series(initial, map, 200);
  for (const auto& s : series.samples) CHECK(s.s_lin <= s.s_vn + 1e-12);
}

TEST_CASE("both subsystems carry the same entropy") {
  std::mt19937_64 rng(8);
  for (auto [d1, d2] : {std::pair<Index, Index>{4, 4}, {5, 11}, {161, 161}}) {
    const auto psi = random_coupled(d1, d2, rng);
    const auto r1 = reduce_first(psi);
    const auto r2 = reduce_second(psi);
    CHECK(std::abs(von_neumann(r1) - von_neumann(r2)) < 1e-9);
    CHECK(std::abs(linear_entropy(r1) - linear_entropy(r2)) < 1e-9);
  }
}

TEST_CASE("entropy is invariant under local unitaries") {
  std::mt19937_64 rng(13);
  const auto psi = random_coupled(6, 7, rng);
  const CMatrix u1 = oracle::random_unitary(6, rng);
  const CMatrix u2 = oracle::random_unitary(7, rng);
  const CoupledState rotated(CMatrix(u1 * psi.grid() * u2.transpose()));
  CHECK(std::abs(von_neumann(reduce_first(psi)) - von_neumann(reduce_first(rotated))) < 1e-10);
  CHECK(std::abs(linear_entropy(reduce_first(psi)) - linear_entropy(reduce_first(rotated))) < 1e-12);
}

TEST_CASE("Husimi function of a coherent state peaks at its centre") {
  const SpinQuantum spin = SpinQuantum::from_j(20);
  const auto a = coherent_state(spin, 1.0, 2.0);
  const ReducedDensity rho{a.amplitudes() * a.amplitudes().adjoint()};
  const auto h = husimi(rho, 41, 81);
  Index r = 0;
  Index c = 0;
  h.q.maxCoeff(&r, &c);
  CHECK(std::abs(h.grid.theta[static_cast<std::size_t>(r)] - 1.0) < 0.1);
  CHECK(std::abs(h.grid.phi[static_cast<std::size_t>(c)] - 2.0) < 0.1);
  CHECK(h.q.maxCoeff() <= 1.0 + 1e-12);
  CHECK(h.normalization() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Husimi function matches direct overlaps") {
  std::mt19937_64 rng(17);
  const SpinQuantum spin = SpinQuantum::from_j(3.5);
  const auto psi = random_coupled(spin.dim(), 5, rng);
  const auto rho = reduce_first(psi);
  const auto h = husimi(rho, 9, 17);
  for (std::size_t it = 0; it < h.grid.theta.size(); it += 3) {
    for (std::size_t ip = 0; ip < h.grid.phi.size(); ip += 4) {
      const CVector v = coherent_state(spin, h.grid.theta[it], h.grid.phi[ip]).amplitudes();
      const double direct = v.dot(rho.rho * v).real();
      CHECK(std::abs(h.q(static_cast<Index>(it), static_cast<Index>(ip)) - direct) < 1e-13);
    }
  }
}

TEST_CASE("Husimi function of the maximally mixed state is flat") {
  const ReducedDensity mixed{CMatrix::Identity(161, 161) / 161.0};
  const auto h = husimi(mixed, 91, 181);
  CHECK(std::abs(h.q.maxCoeff() - 1.0 / 161.0) < 1e-12);
  CHECK(std::abs(h.q.minCoeff() - 1.0 / 161.0) < 1e-12);
  CHECK(h.normalization() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(h.area_fraction_above(0.5 / 161.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.area_fraction_above(2.0 / 161.0) == 0.0);
}

TEST_CASE("Husimi normalization at j = 80 on the default grid") {
  std::mt19937_64 rng(2);
  const auto psi = random_coupled(161, 161, rng);
  const auto h = husimi(reduce_first(psi));
  CHECK(std::abs(h.normalization() - 1.0) < 1e-6);
  CHECK(h.q.minCoeff() >= -1e-14);
}

TEST_CASE("entropy series records t = 0..steps") {
  const SpinQuantum spin = SpinQuantum::from_j(5);
  const auto map = build_coupled(spin, 7.0, 7.0, 1e-3);
  const auto initial = CoupledState::product(coherent_state(spin, 0.89, 0.63), coherent_state(spin, 0.89, 0.63));
  const auto series = entropy_series(initial, map, 12, false);
  REQUIRE(series.samples.size() == 13);
  CHECK(series.samples.front().t == 0);
  CHECK(series.samples.back().t == 12);
  CHECK(series.samples.front().s_lin < 1e-14);
  CHECK(series.samples[5].s_vn == 0.0);
  CHECK(series.s0 == doctest::Approx(2.0 * 1e-6 * 25.0));
  CHECK(series.subsystem_dim == 11);
  CHECK(series.samples.front().jz_mean == doctest::Approx(std::cos(0.89)).epsilon(1e-12));
}

TEST_CASE("linear entropy keeps precision near product states") {
  const double delta = 1e-12;
  CMatrix grid = CMatrix::Zero(4, 4);
  grid(0, 0) = std::sqrt(1.0 - delta);
  grid(3, 1) = std::sqrt(delta);
  const CoupledState state(grid);
  CHECK(linear_entropy(state) == doctest::Approx(2.0 * delta * (1.0 - delta)).epsilon(1e-10));

  const SpinQuantum spin = SpinQuantum::from_j(80);
  const auto psi = coherent_state(spin, 0.89, 0.63);
  const auto series = entropy_series(CoupledState::product(psi, psi), build_coupled(spin, 7.0, 7.0, 0.0), 30);
  for (const auto& s : series.samples) CHECK(s.s_lin < 1e-20);

  std::mt19937_64 rng(6);
  const auto mixed = random_coupled(9, 9, rng);
  CHECK(linear_entropy(mixed) == linear_entropy(reduce_first(mixed)));
}
