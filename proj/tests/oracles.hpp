#pragma once

// Reference computations used only by tests. They are written against plain
// Eigen and loops so that they share no algorithmic code with the library.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline std::vector<int> digits_of(std::size_t x, const std::vector<int>& sizes) {
  std::vector<int> d(sizes.size());
  for (std::size_t i = sizes.size(); i-- > 0;) {
    d[i] = static_cast<int>(x % static_cast<std::size_t>(sizes[i]));
    x /= static_cast<std::size_t>(sizes[i]);
  }
  return d;
}

inline std::size_t index_of(const std::vector<int>& digits, const std::vector<int>& sizes) {
  std::size_t x = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) x = x * static_cast<std::size_t>(sizes[i]) + static_cast<std::size_t>(digits[i]);
  return x;
}

/// Partial trace by direct summation over matching digit strings.
inline CMatrix partial_trace(const CMatrix& m, const std::vector<int>& sizes, const std::vector<int>& keep) {
  std::vector<int> kept_sizes;
  for (int i : keep) kept_sizes.push_back(sizes[static_cast<std::size_t>(i)]);
  std::size_t dk = 1;
  for (int s : kept_sizes) dk *= static_cast<std::size_t>(s);
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  const auto d = static_cast<std::size_t>(m.rows());
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) {
      const auto dr = digits_of(r, sizes);
      const auto dc = digits_of(c, sizes);
      bool traced_equal = true;
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (std::find(keep.begin(), keep.end(), static_cast<int>(i)) != keep.end()) continue;
        if (dr[i] != dc[i]) traced_equal = false;
      }
      if (!traced_equal) continue;
      std::vector<int> kr, kc;
      for (int i : keep) {
        kr.push_back(dr[static_cast<std::size_t>(i)]);
        kc.push_back(dc[static_cast<std::size_t>(i)]);
      }
      out(static_cast<Eigen::Index>(index_of(kr, kept_sizes)), static_cast<Eigen::Index>(index_of(kc, kept_sizes))) +=
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  return out;
}

inline RVector eigenvalues(const CMatrix& m) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly).eigenvalues();
}

inline double entropy(const CMatrix& m) {
  double h = 0.0;
  for (double p : eigenvalues(m))
    if (p > 1e-300) h -= p * std::log(p);
  return h;
}

/// sum_i H(rho_i) - H(rho) from brute-force marginals.
inline double multi_information(const CMatrix& rho, const std::vector<int>& sizes) {
  double s = -entropy(rho);
  for (int i = 0; i < static_cast<int>(sizes.size()); ++i) s += entropy(partial_trace(rho, sizes, {i}));
  return s;
}

/// D(rho || sigma) for full-rank sigma.
inline double relative_entropy(const CMatrix& rho, const CMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (sigma + sigma.adjoint()));
  const RVector l = es.eigenvalues().array().log().matrix();
  const CMatrix log_sigma = es.eigenvectors() * l.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  return -entropy(rho) - (rho * log_sigma).trace().real();
}

// ------------------------------------------------------------ IPF oracle

/// Classical iterative proportional fitting on bit strings with a fixed
/// sweep budget. `sets` lists the maximal margins as unit index lists.
inline RVector ipf(const RVector& target, const std::vector<int>& sizes, const std::vector<std::vector<int>>& sets,
                   int sweeps) {
  const auto d = static_cast<std::size_t>(target.size());
  RVector q = RVector::Constant(target.size(), 1.0 / static_cast<double>(d));
  for (int s = 0; s < sweeps; ++s)
    for (const auto& set : sets) {
      std::vector<int> sub;
      for (int i : set) sub.push_back(sizes[static_cast<std::size_t>(i)]);
      std::size_t cells = 1;
      for (int v : sub) cells *= static_cast<std::size_t>(v);
      std::vector<std::size_t> cell(d);
      for (std::size_t x = 0; x < d; ++x) {
        const auto dg = digits_of(x, sizes);
        std::vector<int> part;
        for (int i : set) part.push_back(dg[static_cast<std::size_t>(i)]);
        cell[x] = index_of(part, sub);
      }
      std::vector<double> want(cells, 0.0), have(cells, 0.0);
      for (std::size_t x = 0; x < d; ++x) {
        want[cell[x]] += target(static_cast<Eigen::Index>(x));
        have[cell[x]] += q(static_cast<Eigen::Index>(x));
      }
      for (std::size_t x = 0; x < d; ++x) {
        const double h = have[cell[x]];
        q(static_cast<Eigen::Index>(x)) = h > 0.0 ? q(static_cast<Eigen::Index>(x)) * want[cell[x]] / h : 0.0;
      }
    }
  return q;
}

/// KL(p || q) with 0 log 0 = 0 and +inf when q misses mass of p.
inline double kl(const RVector& p, const RVector& q) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    if (q(i) <= 0.0) return std::numeric_limits<double>::infinity();
    s += p(i) * std::log(p(i) / q(i));
  }
  return s;
}

/// Feasibility in the factorization sense: IPF started at uniform and
/// fitted to the margins of uniform-on-support returns uniform-on-support.
inline bool ipf_feasible(const std::vector<std::size_t>& support, const std::vector<int>& sizes,
                         const std::vector<std::vector<int>>& sets, int sweeps = 4000) {
  std::size_t d = 1;
  for (int s : sizes) d *= static_cast<std::size_t>(s);
  RVector u = RVector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t x : support) u(static_cast<Eigen::Index>(x)) = 1.0 / static_cast<double>(support.size());
  return kl(u, ipf(u, sizes, sets, sweeps)) <= 1e-8;
}

/// All subsets of {0..n-1} of size exactly k.
inline std::vector<std::vector<int>> k_subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  for (unsigned m = 0; m < (1u << n); ++m) {
    if (__builtin_popcount(m) != k) continue;
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if ((m >> i) & 1u) s.push_back(i);
    out.push_back(s);
  }
  return out;
}

// ------------------------------------------------------------ Pauli strings

inline CMatrix pauli(int a) {
  CMatrix p(2, 2);
  switch (a) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, cplx(0, -1), cplx(0, 1), 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Pauli strings on n qubits with between 1 and k non-identity letters.
inline std::vector<CMatrix> local_pauli_strings(int n, int k) {
  std::vector<CMatrix> out;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 4;
  for (int code = 1; code < total; ++code) {
    int c = code, weight = 0;
    CMatrix m = CMatrix::Ones(1, 1);
    for (int i = 0; i < n; ++i) {
      const int letter = c % 4;
      c /= 4;
      weight += letter != 0;
      m = kron(m, pauli(letter));
    }
    if (weight <= k) out.push_back(m);
  }
  return out;
}

// ------------------------------------------------------------ entropy sandwich

/// log tr exp(h) - tr(h rho): an upper bound on the entropy of every state
/// sharing rho's expectations of the terms of h.
inline double dual_bound(const CMatrix& h, const CMatrix& rho) {
  const RVector l = eigenvalues(h);
  const double top = l.maxCoeff();
  return top + std::log((l.array() - top).exp().sum()) - (h * rho).trace().real();
}

/// Coordinate descent with golden-section line searches on
/// theta -> dual_bound(sum theta_j P_j, rho).
inline double minimize_dual_bound(const std::vector<CMatrix>& terms, const CMatrix& rho, int sweeps = 30,
                                  double range = 40.0) {
  std::vector<double> theta(terms.size(), 0.0);
  CMatrix h = CMatrix::Zero(rho.rows(), rho.cols());
  double best = dual_bound(h, rho);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int s = 0; s < sweeps; ++s)
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const CMatrix rest = h - theta[j] * terms[j];
      auto f = [&](double x) { return dual_bound(rest + x * terms[j], rho); };
      double a = -range, b = range;
      double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
      double f1 = f(x1), f2 = f(x2);
      for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
          b = x2; x2 = x1; f2 = f1; x1 = b - phi * (b - a); f1 = f(x1);
        } else {
          a = x1; x1 = x2; f1 = f2; x2 = a + phi * (b - a); f2 = f(x2);
        }
      }
      const double x = 0.5 * (a + b);
      if (f(x) < best) {
        best = f(x);
        theta[j] = x;
        h = rest + x * terms[j];
      }
    }
  return best;
}

// ------------------------------------------------------------ product-state search

inline CMatrix qubit_from_bloch(const Eigen::Vector3d& r) {
  return 0.5 * (pauli(0) + r(0) * pauli(1) + r(1) * pauli(2) + r(2) * pauli(3));
}

/// min over full-rank product states sigma_A x sigma_B of D(rho || sigma),
/// by coordinate descent on the two Bloch vectors (radius kept below 1).
inline double min_divergence_from_products(const CMatrix& rho, std::mt19937_64& rng, int sweeps = 60) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::Matrix<double, 6, 1> x;
  for (int i = 0; i < 6; ++i) x(i) = u(rng);
  auto f = [&](const Eigen::Matrix<double, 6, 1>& v) {
    const Eigen::Vector3d a = v.head<3>(), b = v.tail<3>();
    if (a.norm() >= 0.999999 || b.norm() >= 0.999999) return std::numeric_limits<double>::infinity();
    return relative_entropy(rho, kron(qubit_from_bloch(a), qubit_from_bloch(b)));
  };
  double best = f(x);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int s = 0; s < sweeps; ++s)
    for (int j = 0; j < 6; ++j) {
      auto g = [&](double t) {
        Eigen::Matrix<double, 6, 1> y = x;
        y(j) = t;
        return f(y);
      };
      double a = -1.0, b = 1.0;
      double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
      double f1 = g(x1), f2 = g(x2);
      for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
          b = x2; x2 = x1; f2 = f1; x1 = b - phi * (b - a); f1 = g(x1);
        } else {
          a = x1; x1 = x2; f1 = f2; x2 = a + phi * (b - a); f2 = g(x2);
        }
      }
      const double t = 0.5 * (a + b);
      if (g(t) < best) {
        best = g(t);
        x(j) = t;
      }
    }
  return best;
}

// ------------------------------------------------------------ dimension formula

/// sum over v in U of prod_{i in v} (dim A_i - 1), with dim A_i = n_i or n_i^2.
inline std::size_t model_dimension(const std::vector<unsigned>& sets, const std::vector<int>& sizes, bool quantum) {
  std::size_t total = 0;
  for (unsigned v : sets) {
    std::size_t p = 1;
    for (std::size_t i = 0; i < sizes.size(); ++i)
      if ((v >> i) & 1u) {
        const auto n = static_cast<std::size_t>(sizes[i]);
        p *= (quantum ? n * n : n) - 1;
      }
    total += p;
  }
  return total;
}

}  // namespace oracle
