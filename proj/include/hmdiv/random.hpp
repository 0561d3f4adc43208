#pragma once

// Random states for tests, experiments and search initialization. All
// draws come from a caller-owned std::mt19937_64.

#include <algorithm>
#include <cstdint>
#include <random>

#include "hmdiv/linalg.hpp"
#include "hmdiv/shape.hpp"
#include "hmdiv/state.hpp"

namespace hmdiv {

using Rng = std::mt19937_64;

/// Independent generator for sub-task `index` of a run seeded with `seed`.
inline Rng derived_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
  return Rng(seq);
}

inline CMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  CMatrix a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = n01(rng);
      const double im = n01(rng);
      a(i, j) = cplx(re, im);
    }
  return a;
}

/// Haar-distributed unit vector in C^d.
inline CVector haar_vector(Eigen::Index d, Rng& rng) {
  CVector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

/// Haar-random pure state; the shape must be all quantum.
inline DensityMatrix haar_pure(const SystemShape& shape, Rng& rng) {
  if (!shape.all_quantum()) throw InvalidArgument("haar_pure: all units must be quantum");
  return DensityMatrix::from_pure(shape, haar_vector(static_cast<Eigen::Index>(shape.dim()), rng));
}

/// Uniform point of the probability simplex (flat Dirichlet).
inline RVector dirichlet(Eigen::Index d, Rng& rng, double alpha = 1.0) {
  std::gamma_distribution<double> g(alpha, 1.0);
  RVector p(d);
  for (Eigen::Index i = 0; i < d; ++i) p(i) = g(rng);
  return p / p.sum();
}

/// Random state of the given rank: A A* / tr(A A*) with A a d x rank Ginibre
/// matrix, restricted to the block structure of classical units.
inline DensityMatrix random_state(const SystemShape& shape, int rank, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(shape.dim());
  if (rank < 1 || rank > d) throw InvalidArgument("random_state: rank out of range");
  if (shape.all_classical()) {
    RVector p = RVector::Zero(d);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const RVector w = dirichlet(rank, rng);
    for (int i = 0; i < rank; ++i) p(idx[static_cast<std::size_t>(i)]) = w(i);
    return DensityMatrix::from_probabilities(shape, p);
  }
  // For mixed shapes `normalized` strips coherences between classical configurations.
  const CMatrix a = ginibre(d, rank, rng);
  return DensityMatrix::normalized(shape, a * a.adjoint());
}

/// Rank-mixed ensemble: rank uniform in 1..d, then random_state.
inline DensityMatrix random_rank_mixed(const SystemShape& shape, Rng& rng) {
  std::uniform_int_distribution<int> rank(1, static_cast<int>(shape.dim()));
  return random_state(shape, rank(rng), rng);
}

/// Full-rank random state.
inline DensityMatrix random_full_rank(const SystemShape& shape, Rng& rng) {
  return random_state(shape, static_cast<int>(shape.dim()), rng);
}

inline RVector random_gaussian_vector(Eigen::Index n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> n01(0.0, scale);
  RVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = n01(rng);
  return v;
}

}  // namespace hmdiv
