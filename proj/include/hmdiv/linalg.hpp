#pragma once

// Dense linear algebra helpers. Every matrix function in the library goes
// through a Hermitian eigendecomposition.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

namespace hmdiv {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd = 1e-10;
/// Relative eigenvalue threshold below which an eigenvalue counts as kernel.
inline constexpr double kernel_relative = 1e-10;
/// Mass on the kernel of sigma that makes D(rho, sigma) infinite.
inline constexpr double kernel_mass = 1e-10;
}  // namespace tol

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Hilbert-Schmidt inner product <a, b> = tr(a b*).
inline cplx hs_inner(const CMatrix& a, const CMatrix& b) {
  return (a.array() * b.array().conjugate()).sum();
}

/// Real part of <a, b>; the inner product of the real space of Hermitian matrices.
inline double hs_real(const CMatrix& a, const CMatrix& b) {
  return (a.real().array() * b.real().array() + a.imag().array() * b.imag().array()).sum();
}

inline double hermitian_deviation(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

inline bool is_exactly_diagonal(const CMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != cplx(0.0, 0.0)) return false;
  return true;
}

/// Eigenvalues in ascending order with matching eigenvector columns.
struct Spectrum {
  RVector values;
  CMatrix vectors;
};

/// Hermitian eigendecomposition; diagonal input skips the solver.
inline Spectrum hermitian_spectrum(const CMatrix& m) {
  const Eigen::Index n = m.rows();
  Spectrum s;
  if (is_exactly_diagonal(m)) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return m(a, a).real() < m(b, b).real(); });
    s.values.resize(n);
    s.vectors = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      s.values(k) = m(order[k], order[k]).real();
      s.vectors(order[k], k) = 1.0;
    }
    return s;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(m));
  s.values = solver.eigenvalues();
  s.vectors = solver.eigenvectors();
  return s;
}

/// V diag(values) V*.
inline CMatrix from_spectrum(const CMatrix& vectors, const RVector& values) {
  return vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
}

/// sinh(x)/x, accurate near zero.
inline double sinhc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 + x * x / 6.0;
  return std::sinh(x) / x;
}

/// Embeds a complex matrix as a real vector [Re(vec m); Im(vec m)], so that
/// the Euclidean product of embeddings equals hs_real.
inline RVector real_embedding(const CMatrix& m) {
  const Eigen::Index n = m.size();
  RVector v(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    v(k) = m.data()[k].real();
    v(n + k) = m.data()[k].imag();
  }
  return v;
}

inline CMatrix from_real_embedding(const RVector& v, Eigen::Index rows, Eigen::Index cols) {
  CMatrix m(rows, cols);
  const Eigen::Index n = rows * cols;
  for (Eigen::Index k = 0; k < n; ++k) m.data()[k] = cplx(v(k), v(n + k));
  return m;
}

}  // namespace hmdiv
