#pragma once

// Interaction matrices of k-party marginals for probability vectors, the
// monomial map, feasibility of supports and the binomial (toric) relations.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "hmdiv/errors.hpp"
#include "hmdiv/linalg.hpp"
#include "hmdiv/shape.hpp"

namespace hmdiv {

using IMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Digits of configuration x written as a string, e.g. "101".
inline std::string config_label(const SystemShape& shape, std::size_t x) {
  std::string s;
  for (int digit : shape.digits(x)) s += std::to_string(digit);
  return s;
}

/// Inverse of config_label for unit sizes up to 10.
inline std::size_t parse_config(const SystemShape& shape, const std::string& label) {
  if (static_cast<int>(label.size()) != shape.units())
    throw ParseError("configuration '" + label + "' should have " + std::to_string(shape.units()) + " digits");
  std::vector<int> digits;
  for (char c : label) {
    if (c < '0' || c > '9') throw ParseError("configuration '" + label + "' contains a non-digit");
    digits.push_back(c - '0');
  }
  try {
    return shape.index(digits);
  } catch (const InvalidArgument&) {
    throw ParseError("configuration '" + label + "' has a digit out of range");
  }
}

/// 0/1 matrix with rows (nu, y), |nu| = k, y a configuration of nu, and
/// columns the configurations x; the entry is 1 iff x restricted to nu is y.
struct InteractionMatrix {
  SystemShape shape;
  int k = 0;
  std::vector<UnitSet> row_sets;            ///< nu of each row
  std::vector<std::vector<int>> row_values;  ///< y of each row
  IMatrix entries;

  std::string row_label(Eigen::Index r) const {
    std::string y;
    for (int v : row_values[r]) y += std::to_string(v);
    return row_sets[r].to_string() + ":" + y;
  }
};

inline void require_classical(const SystemShape& shape, const char* what) {
  if (!shape.all_classical()) throw InvalidArgument(std::string(what) + ": all units must be classical");
}

/// Rows grouped by nu in lexicographic order of members, y in mixed-radix order.
inline InteractionMatrix build_interaction_matrix(const SystemShape& shape, int k) {
  require_classical(shape, "build_interaction_matrix");
  const int n = shape.units();
  if (k < 1 || k > n) throw InvalidArgument("build_interaction_matrix: k must satisfy 1 <= k <= N");
  std::vector<UnitSet> subsets;
  for (std::uint32_t b = 0; b < (1u << n); ++b)
    if (std::popcount(b) == k) subsets.emplace_back(b);
  std::sort(subsets.begin(), subsets.end(), canonical_less);

  InteractionMatrix a;
  a.shape = shape;
  a.k = k;
  for (UnitSet nu : subsets) {
    const SystemShape sub = shape.restrict_to(nu);
    for (std::size_t y = 0; y < sub.dim(); ++y) {
      a.row_sets.push_back(nu);
      a.row_values.push_back(sub.digits(y));
    }
  }
  const auto d = static_cast<Eigen::Index>(shape.dim());
  a.entries = IMatrix::Zero(static_cast<Eigen::Index>(a.row_sets.size()), d);
  for (Eigen::Index x = 0; x < d; ++x) {
    const auto dig = shape.digits(static_cast<std::size_t>(x));
    for (Eigen::Index r = 0; r < a.entries.rows(); ++r) {
      const auto members = a.row_sets[r].members();
      bool match = true;
      for (std::size_t m = 0; m < members.size() && match; ++m) match = dig[members[m]] == a.row_values[r][m];
      if (match) a.entries(r, x) = 1;
    }
  }
  return a;
}

/// Phi(t)_x = prod_r t_r^{a_{r,x}}, with 0^0 = 1.
inline RVector monomial_map(const InteractionMatrix& a, const RVector& t) {
  if (t.size() != a.entries.rows())
    throw InvalidArgument("monomial_map: expected " + std::to_string(a.entries.rows()) + " parameters");
  if ((t.array() < 0.0).any()) throw InvalidArgument("monomial_map: parameters must be nonnegative");
  RVector out = RVector::Ones(a.entries.cols());
  for (Eigen::Index x = 0; x < a.entries.cols(); ++x)
    for (Eigen::Index r = 0; r < a.entries.rows(); ++r)
      if (a.entries(r, x) != 0) out(x) *= std::pow(t(r), static_cast<double>(a.entries(r, x)));
  return out;
}

/// F is k-feasible iff no configuration outside F has all its k-marginal
/// rows covered by the rows of F. Configurations are column indices.
inline bool is_k_feasible(const std::vector<std::size_t>& support, const InteractionMatrix& a) {
  if (support.empty()) throw InvalidArgument("is_k_feasible: support must be non-empty");
  const auto d = static_cast<std::size_t>(a.entries.cols());
  std::vector<bool> in_f(d, false);
  std::vector<bool> covered(static_cast<std::size_t>(a.entries.rows()), false);
  for (std::size_t x : support) {
    if (x >= d) throw InvalidArgument("is_k_feasible: configuration index out of range");
    in_f[x] = true;
    for (Eigen::Index r = 0; r < a.entries.rows(); ++r)
      if (a.entries(r, static_cast<Eigen::Index>(x))) covered[r] = true;
  }
  for (std::size_t x = 0; x < d; ++x) {
    if (in_f[x]) continue;
    bool inside = true;
    for (Eigen::Index r = 0; r < a.entries.rows() && inside; ++r)
      if (a.entries(r, static_cast<Eigen::Index>(x)) && !covered[r]) inside = false;
    if (inside) return false;
  }
  return true;
}

inline bool is_k_feasible(const std::vector<std::size_t>& support, const SystemShape& shape, int k) {
  return is_k_feasible(support, build_interaction_matrix(shape, k));
}

struct FeasibilityReport {
  int k = 0;
  int max_size = 0;
  std::vector<std::size_t> checked_by_size;   ///< index = subset size
  std::vector<std::size_t> feasible_by_size;
  std::vector<std::vector<std::size_t>> non_feasible;          ///< all non-feasible subsets found
  std::vector<std::vector<std::size_t>> minimal_non_feasible;  ///< no proper non-feasible subset
  bool small_sets_feasible = true;  ///< every subset of size <= k is feasible
};

/// Classifies every non-empty subset of size <= max_size.
inline FeasibilityReport enumerate_feasibility(const SystemShape& shape, int k, int max_size,
                                               std::size_t guard = std::size_t{1} << 20) {
  const InteractionMatrix a = build_interaction_matrix(shape, k);
  const std::size_t d = shape.dim();
  if (max_size < 1) throw InvalidArgument("enumerate_feasibility: max_size must be >= 1");
  max_size = std::min<int>(max_size, static_cast<int>(d));
  if (d >= 63) throw GuardExceeded("enumerate_feasibility: configuration space too large");

  // Count subsets before enumerating them.
  double total = 0.0;
  double binom = 1.0;
  for (int s = 1; s <= max_size; ++s) {
    binom = binom * static_cast<double>(d - s + 1) / s;
    total += binom;
  }
  if (total > static_cast<double>(guard))
    throw GuardExceeded("enumerate_feasibility: " + std::to_string(static_cast<long long>(total)) +
                        " subsets exceed the guard of " + std::to_string(guard));

  FeasibilityReport rep;
  rep.k = k;
  rep.max_size = max_size;
  rep.checked_by_size.assign(static_cast<std::size_t>(max_size) + 1, 0);
  rep.feasible_by_size.assign(static_cast<std::size_t>(max_size) + 1, 0);
  std::vector<std::uint64_t> bad_masks;

  for (int s = 1; s <= max_size; ++s) {
    // Lexicographic s-combinations of {0..d-1}.
    std::vector<std::size_t> comb(static_cast<std::size_t>(s));
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    while (true) {
      ++rep.checked_by_size[s];
      if (is_k_feasible(comb, a)) {
        ++rep.feasible_by_size[s];
      } else {
        std::uint64_t mask = 0;
        for (std::size_t x : comb) mask |= std::uint64_t{1} << x;
        const bool minimal = std::none_of(bad_masks.begin(), bad_masks.end(),
                                          [&](std::uint64_t b) { return (b & mask) == b; });
        rep.non_feasible.push_back(comb);
        if (minimal) rep.minimal_non_feasible.push_back(comb);
        bad_masks.push_back(mask);
        if (s <= k) rep.small_sets_feasible = false;
      }
      int i = s - 1;
      while (i >= 0 && comb[i] == d - static_cast<std::size_t>(s - i)) --i;
      if (i < 0) break;
      ++comb[i];
      for (int j = i + 1; j < s; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  return rep;
}

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw GuardExceeded("toric_kernel: integer overflow");
  return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw GuardExceeded("toric_kernel: integer overflow");
  return r;
}

}  // namespace detail

/// Lattice basis of {w in Z^d : A w = 0}. Unimodular row reduction of
/// [A^T | I]: rows whose left block vanishes carry the kernel basis. Each
/// vector is sign-normalized so its first nonzero entry is positive.
inline std::vector<IVector> toric_kernel(const IMatrix& a) {
  const Eigen::Index d = a.cols();
  const Eigen::Index m = a.rows();
  IMatrix work(d, m + d);
  work.leftCols(m) = a.transpose();
  work.rightCols(d) = IMatrix::Identity(d, d);

  Eigen::Index pivot_row = 0;
  for (Eigen::Index col = 0; col < m && pivot_row < d; ++col) {
    // Euclid on column `col` below pivot_row until a single nonzero remains.
    while (true) {
      Eigen::Index best = -1;
      for (Eigen::Index r = pivot_row; r < d; ++r)
        if (work(r, col) != 0 && (best < 0 || std::abs(work(r, col)) < std::abs(work(best, col)))) best = r;
      if (best < 0) break;
      work.row(pivot_row).swap(work.row(best));
      bool done = true;
      for (Eigen::Index r = pivot_row + 1; r < d; ++r) {
        if (work(r, col) == 0) continue;
        const std::int64_t q = work(r, col) / work(pivot_row, col);
        for (Eigen::Index c = 0; c < work.cols(); ++c)
          work(r, c) = detail::checked_sub(work(r, c), detail::checked_mul(q, work(pivot_row, c)));
        if (work(r, col) != 0) done = false;
      }
      if (done) break;
    }
    if (work(pivot_row, col) != 0) ++pivot_row;
  }

  std::vector<IVector> basis;
  for (Eigen::Index r = pivot_row; r < d; ++r) {
    IVector w = work.block(r, m, 1, d).transpose();
    for (Eigen::Index i = 0; i < d; ++i) {
      if (w(i) == 0) continue;
      if (w(i) < 0) w = -w;
      break;
    }
    basis.push_back(std::move(w));
  }
  return basis;
}

inline std::vector<IVector> toric_kernel(const InteractionMatrix& a) { return toric_kernel(a.entries); }

struct ToricCheck {
  bool member = true;
  std::vector<double> residuals;  ///< |prod s^u - prod s^v| / max(both) per kernel vector (0 if both vanish)
  bool zero_support = false;      ///< s has zero entries: a basis-level check may not decide membership
};

/// Tests prod s^u = prod s^v for the positive and negative parts u, v of
/// every kernel basis vector, relative tolerance `tol`.
inline ToricCheck check_toric_membership(const RVector& s, const std::vector<IVector>& kernel, double tol = 1e-9) {
  if ((s.array() < 0.0).any()) throw InvalidArgument("check_toric_membership: entries must be nonnegative");
  ToricCheck out;
  out.zero_support = (s.array() == 0.0).any();
  for (const IVector& w : kernel) {
    if (w.size() != s.size()) throw ShapeMismatch("check_toric_membership: vector length mismatch");
    double lhs = 1.0;
    double rhs = 1.0;
    for (Eigen::Index x = 0; x < w.size(); ++x) {
      if (w(x) > 0) lhs *= std::pow(s(x), static_cast<double>(w(x)));
      if (w(x) < 0) rhs *= std::pow(s(x), static_cast<double>(-w(x)));
    }
    const double scale = std::max(lhs, rhs);
    const double res = scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
    out.residuals.push_back(res);
    if (res > tol) out.member = false;
  }
  return out;
}

inline ToricCheck check_toric_membership(const RVector& s, const InteractionMatrix& a, double tol = 1e-9) {
  return check_toric_membership(s, toric_kernel(a), tol);
}

/// Uniform probability vector on a set of configurations.
inline RVector uniform_on(const std::vector<std::size_t>& support, std::size_t d) {
  if (support.empty()) throw InvalidArgument("uniform_on: empty support");
  RVector p = RVector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t x : support) {
    if (x >= d) throw InvalidArgument("uniform_on: configuration index out of range");
    p(static_cast<Eigen::Index>(x)) = 1.0;
  }
  return p / p.sum();
}

}  // namespace hmdiv
