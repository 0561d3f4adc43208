#pragma once

// Orthonormal bases of the single-unit algebras. Element 0 is always the
// normalized identity 1/sqrt(n).

#include <cmath>
#include <numbers>
#include <vector>

#include "hmdiv/errors.hpp"
#include "hmdiv/linalg.hpp"
#include "hmdiv/shape.hpp"

namespace hmdiv {

/// Index of E_{k,l} in the list returned by basis_E.
inline int basis_E_index(int n, int k, int l) { return k * n + l; }

/// The n^2 matrices E_{k,l} (k, l = 0..n-1), orthonormal in M_n under
/// <a, b> = tr(a b*). With 1-based matrix indices r, s:
///   (E_{k,l})_{r,s} = [ exp(i pi (r+s) k/n) [s = r+l] + exp(i pi (r+s-n) k/n) [s = r+l-n] ] / sqrt(n)
inline std::vector<CMatrix> basis_E(int n) {
  if (n < 1) throw InvalidArgument("basis_E: n must be >= 1");
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      CMatrix e = CMatrix::Zero(n, n);
      for (int r = 1; r <= n; ++r) {
        const double phase = std::numbers::pi * static_cast<double>(k) / n;
        int s = r + l;
        if (s <= n) e(r - 1, s - 1) += scale * std::polar(1.0, phase * (r + s));
        s = r + l - n;
        if (s >= 1) e(r - 1, s - 1) += scale * std::polar(1.0, phase * (r + s - n));
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

/// Gram matrix G_ab = <b_a, b_b> = tr(b_a b_b*).
inline CMatrix gram_matrix(const std::vector<CMatrix>& basis) {
  const auto m = static_cast<Eigen::Index>(basis.size());
  CMatrix g(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = a; b < m; ++b) {
      g(a, b) = hs_inner(basis[a], basis[b]);
      g(b, a) = std::conj(g(a, b));
    }
  return g;
}

/// Self-adjoint orthonormal basis spanning the same real space. The input
/// must be orthonormal and closed under adjoints up to a unimodular factor:
/// fixed points E* = cE become sqrt(c)E, pairs (E, E*) become E + E* and
/// i(E - E*). Every output is rescaled to unit norm.
inline std::vector<CMatrix> hermitize_basis(const std::vector<CMatrix>& basis) {
  constexpr double match_tol = 1e-9;
  constexpr double degenerate_tol = 1e-12;
  const std::size_t m = basis.size();
  std::vector<bool> used(m, false);
  std::vector<CMatrix> out;
  out.reserve(m);

  auto emit = [&](CMatrix h) {
    h = hermitian_part(h);
    const double norm = h.norm();
    if (norm < degenerate_tol) throw DegeneratePair("hermitize_basis: symmetrized matrix vanishes");
    out.push_back(h / norm);
  };

  for (std::size_t a = 0; a < m; ++a) {
    if (used[a]) continue;
    const CMatrix adj = basis[a].adjoint();
    std::size_t partner = m;
    cplx factor = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      if (used[b]) continue;
      const cplx c = hs_inner(adj, basis[b]);
      if (std::abs(std::abs(c) - 1.0) < match_tol) {
        partner = b;
        factor = c;
        break;
      }
    }
    if (partner == m) throw InvalidArgument("hermitize_basis: input is not closed under adjoints");
    used[a] = true;
    if (partner == a) {
      // E* = cE with |c| = 1, so sqrt(c) E is self-adjoint.
      emit(std::sqrt(factor) * basis[a]);
    } else {
      used[partner] = true;
      emit(basis[a] + adj);
      emit(cplx(0.0, 1.0) * (basis[a] - adj));
    }
  }
  return out;
}

/// Orthonormal basis of the diagonal n x n matrices: 1/sqrt(n) followed by
/// the cosine contrasts sqrt(2/n) cos(pi (m + 1/2) j / n), j = 1..n-1.
inline std::vector<CMatrix> classical_unit_basis(int n) {
  if (n < 1) throw InvalidArgument("classical_unit_basis: n must be >= 1");
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(n));
  out.push_back(CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(n)));
  const double scale = std::sqrt(2.0 / n);
  for (int j = 1; j < n; ++j) {
    CMatrix e = CMatrix::Zero(n, n);
    for (int m = 0; m < n; ++m) e(m, m) = scale * std::cos(std::numbers::pi * (m + 0.5) * j / n);
    out.push_back(std::move(e));
  }
  return out;
}

/// Self-adjoint orthonormal basis of one unit algebra, identity first.
inline std::vector<CMatrix> unit_basis(int n, UnitKind kind) {
  return kind == UnitKind::classical ? classical_unit_basis(n) : hermitize_basis(basis_E(n));
}

}  // namespace hmdiv
