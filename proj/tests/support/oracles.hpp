// Independent reference computations used only by the tests. Nothing here
// calls into the structured code paths it is used to check.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace ktop::oracle {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// exp(m) by scaling and squaring of a degree-30 Taylor series.
inline CMatrix expm(const CMatrix& m) {
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const CMatrix scaled = m / std::pow(2.0, squarings);
  CMatrix term = CMatrix::Identity(m.rows(), m.cols());
  CMatrix sum = term;
  for (int n = 1; n <= 30; ++n) {
    term = term * scaled / static_cast<double>(n);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Ladder-operator construction written out element by element.
struct NaiveSpin {
  CMatrix jx, jy, jz;
};

inline NaiveSpin naive_spin(double j) {
  const Index d = static_cast<Index>(std::lround(2.0 * j)) + 1;
  NaiveSpin s{CMatrix::Zero(d, d), CMatrix::Zero(d, d), CMatrix::Zero(d, d)};
  for (Index r = 0; r < d; ++r) {
    const double m = static_cast<double>(r) - j;
    s.jz(r, r) = m;
    if (r + 1 < d) {
      const double up = std::sqrt(j * (j + 1.0) - m * (m + 1.0));  // <m+1|J+|m>
      s.jx(r + 1, r) += 0.5 * up;
      s.jx(r, r + 1) += 0.5 * up;
      s.jy(r + 1, r) += Complex(0.0, -0.5) * up;
      s.jy(r, r + 1) += Complex(0.0, 0.5) * up;
    }
  }
  return s;
}

/// exp(-i k Jz^2 / 2j) exp(-i pi/2 Jy), both from the Taylor oracle.
inline CMatrix single_top_unitary(double j, double k) {
  const NaiveSpin s = naive_spin(j);
  const Complex mi(0.0, -1.0);
  return expm(mi * k / (2.0 * j) * s.jz * s.jz) * expm(mi * (std::numbers::pi / 2.0) * s.jy);
}

/// Full coupled one-period unitary in the Kronecker basis, i1 * d2 + i2.
inline CMatrix coupled_unitary(double j, double k1, double k2, double eps) {
  const NaiveSpin s = naive_spin(j);
  const CMatrix coupling = expm(Complex(0.0, -eps / j) * kron(s.jz, s.jz));
  return coupling * kron(single_top_unitary(j, k1), single_top_unitary(j, k2));
}

/// rho_{m m'} = sum_n psi[m, n] conj(psi[m', n]) from a Kronecker vector.
inline CMatrix partial_trace_second(const CVector& psi, Index d1, Index d2) {
  CMatrix rho = CMatrix::Zero(d1, d1);
  for (Index m = 0; m < d1; ++m)
    for (Index mp = 0; mp < d1; ++mp)
      for (Index n = 0; n < d2; ++n) rho(m, mp) += psi[m * d2 + n] * std::conj(psi[mp * d2 + n]);
  return rho;
}

inline CMatrix partial_trace_first(const CVector& psi, Index d1, Index d2) {
  CMatrix rho = CMatrix::Zero(d2, d2);
  for (Index n = 0; n < d2; ++n)
    for (Index np = 0; np < d2; ++np)
      for (Index m = 0; m < d1; ++m) rho(n, np) += psi[m * d2 + n] * std::conj(psi[m * d2 + np]);
  return rho;
}

/// Normalized covariance kernel from explicitly Heisenberg-evolved operators
/// Jz^n = (U^dagger)^n Jz U^n, O(window dim^3).
inline CMatrix heisenberg_kernel(const CMatrix& u, const CMatrix& jz, const CVector& psi, double j,
                                 int window) {
  std::vector<CMatrix> ops;
  CMatrix un = CMatrix::Identity(u.rows(), u.cols());
  for (int n = 0; n <= window; ++n) {
    ops.push_back(un.adjoint() * jz * un);
    un = u * un;
  }
  CMatrix c(window + 1, window + 1);
  for (int m = 0; m <= window; ++m) {
    for (int n = 0; n <= window; ++n) {
      const Complex second = psi.dot(ops[m] * ops[n] * psi);
      const Complex am = psi.dot(ops[m] * psi);
      const Complex an = psi.dot(ops[n] * psi);
      c(m, n) = (second - am * an) / (j * j);
    }
  }
  return c;
}

/// sum_{m,n=0}^{w} r^{|m-n|} in closed form, r = exp(-gamma).
inline double geometric_block_sum(double gamma, int w) {
  const double r = std::exp(-gamma);
  const double n = w + 1.0;
  const double rw = std::pow(r, w);
  const double first = n * r * (1.0 - rw) / (1.0 - r);
  const double second = r * (1.0 - n * rw + w * rw * r) / ((1.0 - r) * (1.0 - r));
  return n + 2.0 * (first - second);
}

inline CVector random_state(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(d);
  for (Index i = 0; i < d; ++i) v[i] = Complex(g(rng), g(rng));
  return v / v.norm();
}

/// Haar-ish random unitary from the QR factorization of a Gaussian matrix.
inline CMatrix random_unitary(Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix z(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index k = 0; k < d; ++k) z(i, k) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  return qr.householderQ() * CMatrix::Identity(d, d);
}

}  // namespace ktop::oracle
