#pragma once

// Local maximizers of the divergence from a hierarchical model: rank and
// support bounds, the exponential-form test and a multi-start ascent.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hmdiv/errors.hpp"
#include "hmdiv/hierarchy.hpp"
#include "hmdiv/maxent.hpp"
#include "hmdiv/random.hpp"
#include "hmdiv/state.hpp"

namespace hmdiv {

/// True when the bound below is not one of the two pure cases (all classical
/// or all quantum) and was derived from the face-dimension inequality.
inline bool support_bound_is_extension(const SystemShape& shape) {
  return !shape.all_classical() && !shape.all_quantum();
}

/// Upper bound on the support size (classical) or rank (quantum) of a local
/// maximizer. With D the model dimension: D + 1 for classical shapes,
/// sqrt(D + 1) for quantum shapes. For mixed shapes the state is a direct sum
/// of blocks of ranks r_x over the classical configurations, its face has
/// dimension sum r_x^2 - 1 <= D, and the bound is the largest sum r_x allowed.
inline double support_bound(const HierarchicalModelSpec& model) {
  const SystemShape& shape = model.shape();
  const double budget = static_cast<double>(model.dim_model()) + 1.0;
  if (shape.all_classical()) return std::min(budget, static_cast<double>(shape.dim()));
  if (shape.all_quantum()) return std::sqrt(budget);
  const auto blocks = static_cast<long long>(shape.classical_dim());
  const auto q = static_cast<long long>(shape.quantum_dim());
  for (long long r = blocks * q; r >= 1; --r) {
    // Spreading r evenly over the blocks minimizes sum r_x^2.
    const long long base = r / blocks;
    const long long rem = r % blocks;
    if (base + (rem > 0 ? 1 : 0) > q) continue;
    const double cost = static_cast<double>(rem * (base + 1) * (base + 1) + (blocks - rem) * base * base);
    if (cost <= budget) return static_cast<double>(r);
  }
  return 1.0;
}

/// Distance of log rho (on its support, projection p) from the compressed
/// model space p (H + R 1) p; zero is necessary for a local maximizer.
inline double check_exponential_form(const DensityMatrix& rho, const HierarchicalModelSpec& model,
                                     double rank_threshold = 1e-9) {
  if (!(rho.shape() == model.shape())) throw ShapeMismatch("check_exponential_form: shape mismatch");
  const Spectrum s = rho.spectrum();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    if (s.values(i) > rank_threshold) keep.push_back(i);
  const auto k = static_cast<Eigen::Index>(keep.size());
  CMatrix v(s.vectors.rows(), k);
  CMatrix log_rho = CMatrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    v.col(i) = s.vectors.col(keep[i]);
    log_rho(i, i) = std::log(s.values(keep[i]));
  }
  RMatrix emb(2 * k * k, static_cast<Eigen::Index>(model.size()));
  for (std::size_t j = 0; j < model.size(); ++j)
    emb.col(static_cast<Eigen::Index>(j)) = real_embedding(v.adjoint() * model.element(j) * v);
  const RVector target = real_embedding(log_rho);
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(emb);
  cod.setThreshold(1e-10);
  const RVector fit = emb * cod.solve(target);
  return (target - fit).norm();
}

struct SearchOptions {
  int restarts = 32;
  std::uint64_t seed = 0;
  int max_iter = 3000;
  double rank_threshold = 1e-9;
  double dedup_tol = 1e-6;
  double grad_tol = 1e-10;
  int threads = 0;  ///< 0: HMDIV_THREADS or 1
  ProjectionOptions projection{};
};

struct MaximizerReport {
  DensityMatrix state;
  double divergence = 0.0;
  int rank = 0;
  int support_size = -1;  ///< classical shapes only
  double bound = 0.0;
  bool bound_satisfied = false;
  double exp_form_residual = 0.0;
  int multiplicity = 0;       ///< restarts that ended at this value
  int first_restart = 0;      ///< lowest restart index in the cluster
  std::uint64_t seed = 0;
};

struct SearchSummary {
  std::vector<MaximizerReport> maximizers;  ///< distinct values, best first
  int restarts = 0;
  int converged = 0;
  int failed = 0;
  double bound = 0.0;
  bool bound_is_extension = false;
  double max_objective_drop = 0.0;  ///< largest decrease between accepted steps
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
};

namespace detail {

struct RestartOutcome {
  std::optional<DensityMatrix> state;
  double divergence = 0.0;
  bool converged = false;
  int iterations = 0;
  double max_drop = 0.0;
  std::string failure;
};

struct Evaluation {
  double value = 0.0;
  CMatrix log_pi;
  bool ok = false;
};

inline Evaluation evaluate_divergence(const DensityMatrix& rho, const HierarchicalModelSpec& model,
                                      const ProjectionOptions& popts) {
  Evaluation e;
  const ProjectionResult r = maxent_project(rho, model, popts);
  if (!r.converged) return e;
  e.value = r.divergence;
  e.log_pi = log_on_support(r.pi.matrix());
  e.ok = true;
  return e;
}

inline RestartOutcome classical_restart(const HierarchicalModelSpec& model, const SearchOptions& opts, Rng& rng) {
  const SystemShape& shape = model.shape();
  const auto d = static_cast<Eigen::Index>(shape.dim());
  RestartOutcome out;
  RVector p = dirichlet(d, rng);
  Evaluation cur = evaluate_divergence(DensityMatrix::from_probabilities(shape, p), model, opts.projection);
  if (!cur.ok) {
    out.failure = "projection failed at the start point";
    return out;
  }
  double eta = 1.0;
  int it = 0;
  int quiet = 0;
  for (; it < opts.max_iter; ++it) {
    // Gradient log p - log pi, centred under p, on the support.
    RVector g = RVector::Zero(d);
    double mean = 0.0;
    for (Eigen::Index x = 0; x < d; ++x)
      if (p(x) > 0.0) {
        g(x) = std::log(p(x)) - cur.log_pi(x, x).real();
        mean += p(x) * g(x);
      }
    double spread = 0.0;
    for (Eigen::Index x = 0; x < d; ++x)
      if (p(x) > 0.0) {
        g(x) -= mean;
        spread += p(x) * g(x) * g(x);
      }
    if (std::sqrt(spread) <= opts.grad_tol) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      RVector q(d);
      const double top = (p.array() > 0.0).select(g.array(), -1e300).maxCoeff();
      for (Eigen::Index x = 0; x < d; ++x) q(x) = p(x) > 0.0 ? p(x) * std::exp(eta * (g(x) - top)) : 0.0;
      q /= q.sum();
      for (Eigen::Index x = 0; x < d; ++x)
        if (q(x) < 1e-12) q(x) = 0.0;
      q /= q.sum();
      Evaluation next = evaluate_divergence(DensityMatrix::from_probabilities(shape, q), model, opts.projection);
      // Armijo condition along the realized step q - p.
      const double predicted = g.dot(q - p);
      if (next.ok && next.value >= cur.value + 1e-4 * predicted && next.value >= cur.value) {
        out.max_drop = std::max(out.max_drop, cur.value - next.value);
        quiet = next.value - cur.value < 1e-15 ? quiet + 1 : 0;
        p = q;
        cur = std::move(next);
        eta = std::min(eta * 2.0, 1e6);
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted || quiet >= 20) {
      out.converged = true;
      break;
    }
  }
  out.iterations = it;
  out.state = DensityMatrix::from_probabilities(shape, p);
  out.divergence = cur.value;
  if (it == opts.max_iter) out.converged = false;
  return out;
}

/// Column j of A lives in classical block j mod blocks; entries outside its
/// block are kept at zero so A A* respects the classical structure.
inline CMatrix block_mask(const SystemShape& shape, Eigen::Index cols) {
  const auto keys = classical_keys(shape);
  const auto blocks = static_cast<std::size_t>(shape.classical_dim());
  CMatrix mask = CMatrix::Zero(static_cast<Eigen::Index>(keys.size()), cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] == static_cast<std::size_t>(j) % blocks) mask(static_cast<Eigen::Index>(i), j) = 1.0;
  return mask;
}

inline RestartOutcome quantum_restart(const HierarchicalModelSpec& model, const SearchOptions& opts, Rng& rng) {
  const SystemShape& shape = model.shape();
  const auto d = static_cast<Eigen::Index>(shape.dim());
  const auto blocks = static_cast<Eigen::Index>(shape.classical_dim());
  const auto per_block = static_cast<Eigen::Index>(shape.quantum_dim());
  const double bound = support_bound(model);
  const Eigen::Index cols =
      std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(bound + 1e-9)), 1, blocks * per_block);
  RestartOutcome out;
  CMatrix mask = block_mask(shape, cols);
  CMatrix a = ginibre(d, cols, rng).cwiseProduct(mask);
  a /= a.norm();
  auto state_of = [&](const CMatrix& m) { return DensityMatrix::normalized(shape, m * m.adjoint()); };
  DensityMatrix rho = state_of(a);
  Evaluation cur = evaluate_divergence(rho, model, opts.projection);
  if (!cur.ok) {
    out.failure = "projection failed at the start point";
    return out;
  }
  double eta = 0.5;
  int it = 0;
  int quiet = 0;
  for (; it < opts.max_iter; ++it) {
    CMatrix g = log_on_support(rho.matrix(), 1e-14) - cur.log_pi;
    g = hermitian_part(g);
    const double mean = hs_real(g, rho.matrix());
    g.diagonal().array() -= mean;
    const CMatrix grad = (2.0 * g * a).cwiseProduct(mask);
    if (grad.norm() <= opts.grad_tol) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      CMatrix trial = a + eta * grad;
      trial /= trial.norm();
      DensityMatrix trial_rho = state_of(trial);
      Evaluation next = evaluate_divergence(trial_rho, model, opts.projection);
      const double predicted = (grad.adjoint() * (trial - a)).trace().real();
      if (next.ok && next.value >= cur.value + 1e-4 * predicted && next.value >= cur.value) {
        out.max_drop = std::max(out.max_drop, cur.value - next.value);
        quiet = next.value - cur.value < 1e-15 ? quiet + 1 : 0;
        a = trial;
        rho = std::move(trial_rho);
        cur = std::move(next);
        eta = std::min(eta * 2.0, 1e3);
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted || quiet >= 20) {
      out.converged = true;
      break;
    }
    // Rank reduction: drop collapsed eigenvalues, and try dropping the
    // smallest one when it is already small; keep the lower rank if it does
    // not lower the objective.
    if (blocks == 1 && a.cols() > 1) {
      const Spectrum s = rho.spectrum();
      auto refactor = [&](double cut) {
        const Eigen::Index alive = (s.values.array() > cut).count();
        CMatrix na(d, alive);
        Eigen::Index c = 0;
        for (Eigen::Index i = 0; i < s.values.size(); ++i)
          if (s.values(i) > cut) na.col(c++) = s.vectors.col(i) * std::sqrt(s.values(i));
        return CMatrix(na / na.norm());
      };
      const Eigen::Index alive = (s.values.array() > 1e-11).count();
      const Eigen::Index first = s.values.size() - a.cols();  // smallest eigenvalue carried by A
      CMatrix candidate;
      if (alive < a.cols()) {
        candidate = refactor(1e-11);
      } else if (s.values(first) < 1e-3 * s.values.maxCoeff()) {
        candidate = refactor(s.values(first));
      }
      if (candidate.size() > 0) {
        DensityMatrix cand_rho = state_of(candidate);
        Evaluation cand = evaluate_divergence(cand_rho, model, opts.projection);
        if (cand.ok && (cand.value >= cur.value || alive < a.cols())) {
          a = candidate;
          mask = CMatrix::Ones(d, a.cols());
          rho = std::move(cand_rho);
          cur = std::move(cand);
          quiet = 0;
        }
      }
    }
  }
  out.iterations = it;
  out.state = rho;
  out.divergence = cur.value;
  if (it == opts.max_iter) out.converged = false;
  return out;
}

inline int thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HMDIV_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace detail

inline int state_rank(const DensityMatrix& rho, double threshold) { return numerical_rank(rho, threshold); }

inline int support_size(const DensityMatrix& rho, double threshold) {
  const RVector p = rho.probabilities();
  return static_cast<int>((p.array() > threshold).count());
}

/// Fills in rank, support, bound and exponential-form data for a state.
inline MaximizerReport describe_maximizer(const DensityMatrix& rho, double divergence,
                                          const HierarchicalModelSpec& model, double rank_threshold = 1e-9) {
  MaximizerReport r{rho};
  r.divergence = divergence;
  r.rank = state_rank(rho, rank_threshold);
  if (model.shape().all_classical()) r.support_size = support_size(rho, rank_threshold);
  r.bound = support_bound(model);
  r.bound_satisfied = static_cast<double>(r.rank) <= r.bound + 1e-9;
  r.exp_form_residual = check_exponential_form(rho, model, rank_threshold);
  return r;
}

/// Multi-start ascent of d_E. Restart i draws its start from
/// derived_rng(seed, i); results are merged in restart order, so the report
/// does not depend on the thread count.
inline SearchSummary local_max_search(const HierarchicalModelSpec& model, const SearchOptions& opts = {}) {
  const SystemShape& shape = model.shape();
  if (shape.dim() > 256) throw GuardExceeded("local_max_search: dimension above 256");
  if (opts.restarts < 1) throw InvalidArgument("local_max_search: need at least one restart");
  std::vector<detail::RestartOutcome> outcomes(static_cast<std::size_t>(opts.restarts));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < opts.restarts; i = next++) {
      Rng rng = derived_rng(opts.seed, static_cast<std::uint64_t>(i));
      try {
        outcomes[static_cast<std::size_t>(i)] = shape.all_classical() ? detail::classical_restart(model, opts, rng)
                                                                      : detail::quantum_restart(model, opts, rng);
      } catch (const std::exception& e) {
        outcomes[static_cast<std::size_t>(i)].failure = e.what();
      }
    }
  };
  const int threads = std::min(detail::thread_count(opts.threads), opts.restarts);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SearchSummary summary;
  summary.restarts = opts.restarts;
  summary.seed = opts.seed;
  summary.bound = support_bound(model);
  summary.bound_is_extension = support_bound_is_extension(shape);
  if (summary.bound_is_extension)
    summary.notes.emplace_back("mixed classical/quantum shape: bound derived from the face-dimension inequality");
  std::vector<int> order;
  for (int i = 0; i < opts.restarts; ++i) {
    const auto& o = outcomes[static_cast<std::size_t>(i)];
    summary.max_objective_drop = std::max(summary.max_objective_drop, o.max_drop);
    if (!o.state || !o.failure.empty()) {
      ++summary.failed;
      summary.notes.push_back("restart " + std::to_string(i) + " failed: " + o.failure);
      continue;
    }
    if (o.converged) ++summary.converged;
    else summary.notes.push_back("restart " + std::to_string(i) + " hit the iteration limit");
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return outcomes[static_cast<std::size_t>(a)].divergence > outcomes[static_cast<std::size_t>(b)].divergence;
  });
  for (int i : order) {
    const auto& o = outcomes[static_cast<std::size_t>(i)];
    if (!summary.maximizers.empty() &&
        std::abs(summary.maximizers.back().divergence - o.divergence) <= opts.dedup_tol) {
      auto& rep = summary.maximizers.back();
      ++rep.multiplicity;
      rep.first_restart = std::min(rep.first_restart, i);
      continue;
    }
    MaximizerReport r = describe_maximizer(*o.state, o.divergence, model, opts.rank_threshold);
    r.multiplicity = 1;
    r.first_restart = i;
    r.seed = opts.seed;
    summary.maximizers.push_back(std::move(r));
  }
  return summary;
}

}  // namespace hmdiv
