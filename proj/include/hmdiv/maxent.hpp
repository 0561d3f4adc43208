#pragma once

// Maximum-entropy projection onto hierarchical models and the correlation
// measures built on it.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hmdiv/errors.hpp"
#include "hmdiv/hierarchy.hpp"
#include "hmdiv/linalg.hpp"
#include "hmdiv/state.hpp"

namespace hmdiv {

enum class Method { automatic, dual, primal, ipf, closed_form };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::automatic: return "auto";
    case Method::dual: return "dual";
    case Method::primal: return "primal";
    case Method::ipf: return "ipf";
    case Method::closed_form: return "closed_form";
  }
  return "unknown";
}

inline Method parse_method(const std::string& s) {
  if (s == "auto") return Method::automatic;
  if (s == "dual") return Method::dual;
  if (s == "primal") return Method::primal;
  if (s == "ipf") return Method::ipf;
  throw InvalidArgument("unknown method '" + s + "' (expected auto, dual, primal or ipf)");
}

/// In auto mode a dual solution whose smallest eigenvalue is below this is
/// re-solved with the primal method.
inline constexpr double kNearBoundaryEigenvalue = 1e-7;

struct ProjectionOptions {
  Method method = Method::automatic;
  double tol = 1e-8;           ///< constraint residual for interior solutions
  double boundary_tol = 1e-5;  ///< accepted residual when the projection lies on the boundary
  int max_iter = 200;          ///< Newton iterations (per continuation level for primal)
  double theta_max = 1e3;      ///< dual parameters beyond this signal a boundary projection
  int ipf_max_sweeps = 20000;
};

/// Coefficients of log pi = sum_j theta_j b_j - logZ over the non-identity
/// model elements b_1, b_2, ...
struct GibbsParameters {
  RVector theta;
  double log_z = 0.0;
};

struct ProjectionResult {
  DensityMatrix pi;
  double divergence = 0.0;           ///< H(pi) - H(rho)
  double constraint_residual = 0.0;  ///< max_j |<b_j, pi> - <b_j, rho>|
  Method method = Method::automatic;
  int iterations = 0;
  bool converged = false;
  bool boundary = false;  ///< pi is singular (theta absent)
  std::optional<GibbsParameters> theta;
  std::vector<std::string> notes;
};

namespace detail {

inline double max_abs_diff(const RVector& a, const RVector& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

/// (log a - log b)/(a - b), with the limit 1/a on the diagonal.
inline double log_divided_difference(double a, double b) {
  const double hi = std::max(a, b);
  if (std::abs(a - b) <= 1e-6 * hi) return 2.0 / (a + b);
  return (std::log(a) - std::log(b)) / (a - b);
}

inline ProjectionResult finish(const DensityMatrix& rho, const HierarchicalModelSpec& model, CMatrix pi_matrix,
                               Method method, int iterations, bool converged,
                               std::optional<GibbsParameters> theta, std::vector<std::string> notes) {
  DensityMatrix pi = DensityMatrix::normalized(rho.shape(), std::move(pi_matrix));
  const RVector target = model.coordinates(rho.matrix());
  const RVector got = model.coordinates(pi.matrix());
  ProjectionResult r{std::move(pi)};
  r.constraint_residual = max_abs_diff(target, got);
  r.divergence = std::max(0.0, von_neumann_entropy(r.pi) - von_neumann_entropy(rho));
  r.method = method;
  r.iterations = iterations;
  r.converged = converged;
  r.boundary = !theta.has_value();
  r.theta = std::move(theta);
  r.notes = std::move(notes);
  return r;
}

// ---------------------------------------------------------------- dual

struct DualPoint {
  double f = 0.0;       // log Z - <theta, c>
  double log_z = 0.0;
  RVector moments;      // <b_j, sigma>, j >= 1
  Spectrum spec;        // of the Hamiltonian
  RVector weights;      // Gibbs eigenvalue weights
};

inline DualPoint dual_evaluate(const HierarchicalModelSpec& model, const RVector& theta, const RVector& c) {
  const auto m1 = static_cast<Eigen::Index>(model.size()) - 1;
  RVector full(m1 + 1);
  full(0) = 0.0;
  full.tail(m1) = theta;
  DualPoint p;
  p.spec = hermitian_spectrum(model.combination(full));
  p.log_z = log_partition(p.spec.values);
  p.weights = (p.spec.values.array() - p.log_z).exp().matrix();
  const CMatrix sigma = model.shape().all_classical()
                            ? CMatrix(p.spec.vectors * p.weights.cast<cplx>().asDiagonal() * p.spec.vectors.adjoint())
                            : from_spectrum(p.spec.vectors, p.weights);
  p.moments = model.coordinates(sigma).tail(m1);
  p.f = p.log_z - theta.dot(c);
  return p;
}

/// Hessian of log Z: the Kubo-Mori covariance of the model elements.
inline RMatrix dual_hessian(const HierarchicalModelSpec& model, const DualPoint& p) {
  const auto m1 = static_cast<Eigen::Index>(model.size()) - 1;
  const RVector& lam = p.spec.values;
  const Eigen::Index d = lam.size();
  RMatrix hess(m1, m1);
  if (model.shape().all_classical()) {
    // Eigenvectors are a permutation; weights per configuration.
    RVector w(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      Eigen::Index x;
      p.spec.vectors.col(k).cwiseAbs().maxCoeff(&x);
      w(x) = p.weights(k);
    }
    const RMatrix dm = model.diagonals().bottomRows(m1);
    hess = dm * w.asDiagonal() * dm.transpose();
  } else {
    // K_ab = (e^{l_a} - e^{l_b}) / (l_a - l_b) / Z, evaluated stably.
    RMatrix sqrt_k(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) {
        const double mid = 0.5 * (lam(a) + lam(b)) - p.log_z;
        sqrt_k(a, b) = std::sqrt(std::exp(mid) * sinhc(0.5 * (lam(a) - lam(b))));
      }
    CMatrix w(d * d, m1);
    for (Eigen::Index j = 0; j < m1; ++j) {
      const CMatrix bt = p.spec.vectors.adjoint() * model.element(static_cast<std::size_t>(j + 1)) * p.spec.vectors;
      const CMatrix scaled = bt.cwiseProduct(sqrt_k.cast<cplx>());
      w.col(j) = Eigen::Map<const CVector>(scaled.data(), d * d);
    }
    hess = (w.adjoint() * w).real();
  }
  hess -= p.moments * p.moments.transpose();
  return 0.5 * (hess + hess.transpose());
}

inline ProjectionResult dual_project(const DensityMatrix& rho, const HierarchicalModelSpec& model,
                                     const ProjectionOptions& opts) {
  const auto m1 = static_cast<Eigen::Index>(model.size()) - 1;
  const RVector c = model.coordinates(rho.matrix()).tail(m1);
  RVector theta = RVector::Zero(m1);
  std::vector<std::string> notes;
  DualPoint p = dual_evaluate(model, theta, c);
  int it = 0;
  bool converged = false;
  bool boundary = false;
  for (; it <= opts.max_iter; ++it) {
    const RVector g = p.moments - c;
    if (m1 == 0 || g.cwiseAbs().maxCoeff() <= opts.tol) {
      converged = true;
      break;
    }
    if (it == opts.max_iter) break;
    const RMatrix h = dual_hessian(model, p);
    RVector step;
    double mu = 0.0;
    for (int attempt = 0; attempt < 30; ++attempt) {
      RMatrix reg = h;
      reg.diagonal().array() += mu;
      Eigen::LDLT<RMatrix> ldlt(reg);
      if (ldlt.info() == Eigen::Success) {
        step = -ldlt.solve(g);
        if (step.allFinite() && step.dot(g) < 0.0) break;
      }
      mu = mu == 0.0 ? 1e-12 * std::max(1.0, h.diagonal().maxCoeff()) : 10.0 * mu;
      step.resize(0);
    }
    if (step.size() == 0) {
      notes.emplace_back("dual: no descent direction");
      break;
    }
    const double step_norm = step.cwiseAbs().maxCoeff();
    if (step_norm > 50.0) step *= 50.0 / step_norm;
    // Armijo backtracking.
    const double slope = step.dot(g);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      DualPoint trial = dual_evaluate(model, theta + t * step, c);
      if (std::isfinite(trial.f) && trial.f <= p.f + 1e-4 * t * slope) {
        theta += t * step;
        p = std::move(trial);
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      notes.emplace_back("dual: line search stalled");
      break;
    }
    if (theta.cwiseAbs().maxCoeff() > opts.theta_max) {
      boundary = true;
      notes.emplace_back("dual: parameters diverge, projection is on the boundary");
      break;
    }
  }
  const CMatrix pi = from_spectrum(p.spec.vectors, p.weights);
  std::optional<GibbsParameters> params;
  if (!boundary) params = GibbsParameters{theta, p.log_z};
  return finish(rho, model, pi, Method::dual, it, converged && !boundary, std::move(params), std::move(notes));
}

// ---------------------------------------------------------------- primal

struct AffineEntropyResult {
  CMatrix tau;
  int iterations = 0;
  double gradient = 0.0;
  bool converged = false;
};

/// Newton ascent of H(tau0 + sum_q z_q D_q) from a positive definite tau0
/// over real z, with D_q Hermitian and traceless.
inline AffineEntropyResult maximize_entropy_affine(const CMatrix& tau0, const std::vector<CMatrix>& dirs,
                                                   double tol, int max_iter) {
  AffineEntropyResult out{tau0};
  const auto n = static_cast<Eigen::Index>(dirs.size());
  const Eigen::Index d = tau0.rows();
  if (n == 0) {
    out.converged = true;
    return out;
  }
  auto entropy_of = [](const RVector& lam) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) h -= lam(i) * std::log(lam(i));
    return h;
  };
  CMatrix tau = tau0;
  Spectrum s = hermitian_spectrum(tau);
  if (!(s.values.minCoeff() > 0.0)) throw std::logic_error("maximize_entropy_affine: start is not positive definite");
  double h_cur = entropy_of(s.values);
  for (int it = 0; it <= max_iter; ++it) {
    out.iterations = it;
    RVector log_l = s.values.array().log().matrix();
    const CMatrix log_tau = from_spectrum(s.vectors, log_l);
    RVector grad(n);
    for (Eigen::Index q = 0; q < n; ++q) grad(q) = -hs_real(dirs[q], log_tau);
    out.gradient = grad.cwiseAbs().maxCoeff();
    if (out.gradient <= tol) {
      out.converged = true;
      break;
    }
    if (it == max_iter) break;

    RMatrix sqrt_g(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        sqrt_g(a, b) = std::sqrt(log_divided_difference(s.values(a), s.values(b)));
    CMatrix w(d * d, n);
    for (Eigen::Index q = 0; q < n; ++q) {
      const CMatrix dt = (s.vectors.adjoint() * dirs[q] * s.vectors).cwiseProduct(sqrt_g.cast<cplx>());
      w.col(q) = Eigen::Map<const CVector>(dt.data(), d * d);
    }
    RMatrix neg_hess = (w.adjoint() * w).real();
    neg_hess = 0.5 * (neg_hess + neg_hess.transpose());
    Eigen::LDLT<RMatrix> ldlt(neg_hess);
    RVector step = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(grad) <= 0.0) step = grad;
    const double decrement = step.dot(grad);
    if (decrement < 1e-24) {
      out.converged = true;
      break;
    }
    CMatrix delta = CMatrix::Zero(d, d);
    for (Eigen::Index q = 0; q < n; ++q) delta += step(q) * dirs[q];
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      const CMatrix trial = tau + t * delta;
      Spectrum ts = hermitian_spectrum(trial);
      if (ts.values.minCoeff() > 0.0) {
        const double h_new = entropy_of(ts.values);
        if (h_new >= h_cur + 1e-4 * t * decrement || (t < 1e-6 && h_new >= h_cur)) {
          tau = trial;
          s = std::move(ts);
          h_cur = h_new;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  out.tau = tau;
  return out;
}

/// Hermitian directions spanning the orthogonal complement of the model
/// inside the composite algebra: tensor elements whose pattern is outside U.
inline std::vector<CMatrix> complement_directions(const HierarchicalModelSpec& model) {
  const SystemShape& shape = model.shape();
  std::vector<UnitSet> all;
  for (std::uint32_t b = 0; b < (1u << shape.units()); ++b) all.emplace_back(b);
  const Hypergraph power = make_hypergraph_unchecked(shape.units(), all);
  const HierarchicalModelSpec full = build_model(shape, power, BuildOptions{false, false});
  const std::size_t d = shape.dim();
  if ((full.size() - model.size()) * d * d > (std::size_t{1} << 26))
    throw GuardExceeded("primal solver: complement of the model is too large");
  std::vector<CMatrix> out;
  for (const auto& e : full.elements())
    if (!model.hypergraph().contains(e.pattern)) out.push_back(full.assemble(e));
  return out;
}

/// Orthonormal basis of the Hermitian part of V* A V for the columns V.
inline std::vector<CMatrix> face_algebra_basis(const SystemShape& shape, const CMatrix& v) {
  const auto k = static_cast<int>(v.cols());
  if (shape.all_quantum()) return unit_basis(k, UnitKind::quantum);
  if (shape.all_classical()) {
    // Eigenvectors of diagonal states are unit vectors: the face is diagonal.
    std::vector<CMatrix> out;
    for (int i = 0; i < k; ++i) {
      CMatrix e = CMatrix::Zero(k, k);
      e(i, i) = 1.0;
      out.push_back(e);
    }
    return out;
  }
  if (shape.algebra_dim() > 4096) throw GuardExceeded("primal solver: algebra too large for facial reduction");
  std::vector<UnitSet> all;
  for (std::uint32_t b = 0; b < (1u << shape.units()); ++b) all.emplace_back(b);
  const HierarchicalModelSpec full =
      build_model(shape, make_hypergraph_unchecked(shape.units(), all), BuildOptions{false, false});
  RMatrix emb(2 * k * k, static_cast<Eigen::Index>(full.size()));
  for (std::size_t j = 0; j < full.size(); ++j)
    emb.col(static_cast<Eigen::Index>(j)) = real_embedding(v.adjoint() * full.element(j) * v);
  Eigen::JacobiSVD<RMatrix> svd(emb, Eigen::ComputeThinU);
  const RVector sv = svd.singularValues();
  std::vector<CMatrix> out;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= 1e-10 * sv(0)) break;
    out.push_back(hermitian_part(from_real_embedding(svd.matrixU().col(i), k, k)));
  }
  return out;
}

inline ProjectionResult primal_project(const DensityMatrix& rho, const HierarchicalModelSpec& model,
                                       const ProjectionOptions& opts) {
  const SystemShape& shape = model.shape();
  const auto d = static_cast<Eigen::Index>(shape.dim());
  const std::vector<CMatrix> dirs = complement_directions(model);
  const RVector c = model.coordinates(rho.matrix());
  std::vector<std::string> notes;
  int total_iter = 0;

  const Spectrum rs = rho.spectrum();
  if (rs.values.minCoeff() > 1e-10 * rs.values.maxCoeff()) {
    // Interior: rho itself is a strictly feasible start.
    const AffineEntropyResult r = maximize_entropy_affine(rho.matrix(), dirs, opts.tol, opts.max_iter);
    ProjectionResult out =
        finish(rho, model, r.tau, Method::primal, r.iterations, false, std::nullopt, std::move(notes));
    out.converged = r.converged && out.constraint_residual <= opts.tol;
    out.boundary = false;
    return out;
  }

  // Stage A: relax the targets towards the maximally mixed state,
  // t_eps = (1 - eps) c + eps c(1/d), and follow eps -> 0. Below eps ~ 1e-8
  // the smallest eigenvalues lose their relative precision in double.
  const CMatrix mixed = CMatrix::Identity(d, d) / static_cast<double>(d);
  CMatrix tau = mixed;
  double eps_prev = 1.0;
  bool levels_ok = true;
  for (int e = 1; e <= 8; ++e) {
    const double eps = std::pow(10.0, -e);
    const double a = eps / eps_prev;
    const CMatrix start = a * tau + (1.0 - a) * rho.matrix();
    if (!(hermitian_spectrum(start).values.minCoeff() > 0.0)) {
      levels_ok = false;
      notes.emplace_back("primal: continuation stopped at eps = " + std::to_string(eps_prev) +
                         ", next start not positive definite");
      break;
    }
    const AffineEntropyResult r = maximize_entropy_affine(start, dirs, opts.tol, opts.max_iter);
    total_iter += r.iterations;
    levels_ok = levels_ok && r.converged;
    tau = r.tau;
    eps_prev = eps;
  }
  if (!levels_ok) notes.emplace_back("primal: some continuation levels stopped before the gradient tolerance");
  else notes.emplace_back("primal: continuation reached eps = 1e-8");

  // Stage B: solve exactly on the face spanned by the dominant eigenvectors.
  const Spectrum ts = hermitian_spectrum(tau);
  const double cut = 1e-6 * ts.values.maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ts.values.size(); ++i)
    if (ts.values(i) > cut) keep.push_back(i);
  const auto k = static_cast<Eigen::Index>(keep.size());
  CMatrix v(d, k);
  for (Eigen::Index i = 0; i < k; ++i) v.col(i) = ts.vectors.col(keep[i]);
  notes.emplace_back("primal: face dimension " + std::to_string(k) + " of " + std::to_string(d));

  auto relaxed_result = [&](std::string why) {
    notes.push_back(std::move(why));
    ProjectionResult out = finish(rho, model, tau, Method::primal, total_iter, false, std::nullopt, notes);
    out.converged = levels_ok && out.constraint_residual <= opts.boundary_tol;
    return out;
  };

  const std::vector<CMatrix> face = face_algebra_basis(shape, v);
  const auto f = static_cast<Eigen::Index>(face.size());
  const auto m = static_cast<Eigen::Index>(model.size());
  RMatrix cm(m, f);
  for (Eigen::Index j = 0; j < m; ++j) {
    const CMatrix bj = v.adjoint() * model.element(static_cast<std::size_t>(j)) * v;
    for (Eigen::Index q = 0; q < f; ++q) cm(j, q) = hs_real(bj, face[q]);
  }
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(cm);
  cod.setThreshold(1e-10);
  const RVector s0 = cod.solve(c);
  if (max_abs_diff(cm * s0, c) > opts.tol) return relaxed_result("primal: face is inconsistent with the targets");

  // Null space of cm via SVD.
  Eigen::JacobiSVD<RMatrix> svd(cm, Eigen::ComputeFullV);
  const RVector sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-10 * std::max(1.0, sv(0))) ++rank;
  std::vector<CMatrix> face_dirs;
  for (Eigen::Index q = rank; q < f; ++q) {
    CMatrix dq = CMatrix::Zero(k, k);
    for (Eigen::Index p = 0; p < f; ++p) dq += svd.matrixV()(p, q) * face[p];
    face_dirs.push_back(dq);
  }

  const CMatrix tau_face = v.adjoint() * tau * v;
  RVector s_start(f);
  for (Eigen::Index q = 0; q < f; ++q) s_start(q) = hs_real(face[q], tau_face);
  s_start -= cod.solve(cm * s_start - c);
  CMatrix sigma = CMatrix::Zero(k, k);
  for (Eigen::Index q = 0; q < f; ++q) sigma += s_start(q) * face[q];
  sigma = hermitian_part(sigma);
  if (!(hermitian_spectrum(sigma).values.minCoeff() > 0.0))
    return relaxed_result("primal: projected face start is not positive definite");

  const AffineEntropyResult r = maximize_entropy_affine(sigma, face_dirs, opts.tol, opts.max_iter);
  total_iter += r.iterations;
  if (!r.converged) return relaxed_result("primal: face solve did not converge");
  ProjectionResult out =
      finish(rho, model, v * r.tau * v.adjoint(), Method::primal, total_iter, false, std::nullopt, notes);
  out.boundary = k < d;
  out.converged = out.constraint_residual <= (out.boundary ? opts.boundary_tol : opts.tol);
  if (!out.boundary) {
    // A full face means the projection is interior after all.
    out.notes.emplace_back("primal: projection is interior");
  }
  return out;
}

// ---------------------------------------------------------------- IPF

inline ProjectionResult ipf_project(const DensityMatrix& rho, const HierarchicalModelSpec& model,
                                    const ProjectionOptions& opts) {
  const SystemShape& shape = model.shape();
  if (!shape.all_classical()) throw InvalidArgument("ipf: all units must be classical");
  const std::size_t d = shape.dim();
  const RVector target = rho.probabilities();
  const RVector c = model.coordinates(rho.matrix());

  struct Margin {
    std::vector<std::size_t> index;  // configuration -> marginal cell
    RVector target;
  };
  std::vector<Margin> margins;
  for (UnitSet v : model.hypergraph().maximal_sets()) {
    Margin mg;
    const SystemShape sub = shape.restrict_to(v);
    const auto members = v.members();
    mg.index.resize(d);
    for (std::size_t x = 0; x < d; ++x) {
      const auto dig = shape.digits(x);
      std::size_t cell = 0;
      for (int i : members) cell = cell * static_cast<std::size_t>(shape.size(i)) + static_cast<std::size_t>(dig[i]);
      mg.index[x] = cell;
    }
    mg.target = RVector::Zero(static_cast<Eigen::Index>(sub.dim()));
    for (std::size_t x = 0; x < d; ++x) mg.target(static_cast<Eigen::Index>(mg.index[x])) += target(static_cast<Eigen::Index>(x));
    margins.push_back(std::move(mg));
  }

  RVector q = RVector::Constant(static_cast<Eigen::Index>(d), 1.0 / static_cast<double>(d));
  int sweep = 0;
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
  for (; sweep < opts.ipf_max_sweeps; ++sweep) {
    for (const Margin& mg : margins) {
      RVector cur = RVector::Zero(mg.target.size());
      for (std::size_t x = 0; x < d; ++x) cur(static_cast<Eigen::Index>(mg.index[x])) += q(static_cast<Eigen::Index>(x));
      for (std::size_t x = 0; x < d; ++x) {
        const auto cell = static_cast<Eigen::Index>(mg.index[x]);
        q(static_cast<Eigen::Index>(x)) = cur(cell) > 0.0 ? q(static_cast<Eigen::Index>(x)) * mg.target(cell) / cur(cell) : 0.0;
      }
    }
    residual = max_abs_diff(model.diagonals() * q, c);
    if (residual <= opts.tol * 1e-2) {
      converged = true;
      ++sweep;
      break;
    }
  }
  CMatrix pi = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t x = 0; x < d; ++x) pi(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = q(static_cast<Eigen::Index>(x));
  std::vector<std::string> notes;
  const bool singular = (q.array() <= 0.0).any();
  ProjectionResult out = finish(rho, model, pi, Method::ipf, sweep, false, std::nullopt, std::move(notes));
  out.boundary = singular;
  out.converged = converged || out.constraint_residual <= opts.tol;
  if (!out.boundary) {
    // Interior IPF limit: recover the Gibbs coordinates from log pi.
    const RVector logp = q.array().log().matrix();
    const RVector coords = model.diagonals() * logp;
    GibbsParameters gp;
    gp.theta = coords.tail(static_cast<Eigen::Index>(model.size()) - 1);
    gp.log_z = -coords(0) / std::sqrt(static_cast<double>(d));
    out.theta = gp;
  }
  return out;
}

/// Product of the one-unit marginals: the projection onto the independence model.
inline CMatrix product_of_marginals(const DensityMatrix& rho) {
  CMatrix out = CMatrix::Ones(1, 1);
  for (int i = 0; i < rho.shape().units(); ++i) out = kron(out, marginal(rho, UnitSet::of({i})).matrix());
  return out;
}

inline bool is_independence_model(const Hypergraph& u) {
  return std::all_of(u.sets().begin(), u.sets().end(), [](UnitSet v) { return v.size() <= 1; });
}

}  // namespace detail

/// pi_E(rho): the entropy maximizer among states sharing rho's expectations
/// of every model element. `auto` uses closed forms for the full and the
/// independence model, otherwise the dual solver with primal fallback.
inline ProjectionResult maxent_project(const DensityMatrix& rho, const HierarchicalModelSpec& model,
                                       const ProjectionOptions& opts = {}) {
  if (!(rho.shape() == model.shape()))
    throw ShapeMismatch("maxent_project: state shape " + rho.shape().to_string() + " vs model shape " +
                        model.shape().to_string());
  switch (opts.method) {
    case Method::dual: return detail::dual_project(rho, model, opts);
    case Method::primal: return detail::primal_project(rho, model, opts);
    case Method::ipf: return detail::ipf_project(rho, model, opts);
    default: break;
  }
  if (model.hypergraph().is_power_set()) {
    ProjectionResult r = detail::finish(rho, model, rho.matrix(), Method::closed_form, 0, true, std::nullopt,
                                        {"model is the full algebra: pi = rho"});
    r.boundary = false;
    r.divergence = 0.0;
    return r;
  }
  if (detail::is_independence_model(model.hypergraph())) {
    ProjectionResult r = detail::finish(rho, model, detail::product_of_marginals(rho), Method::closed_form, 0, true,
                                        std::nullopt, {"independence model: pi is the product of marginals"});
    r.converged = r.constraint_residual <= opts.tol;
    r.boundary = r.pi.spectrum().values.minCoeff() <= 0.0;
    return r;
  }
  ProjectionResult dual = detail::dual_project(rho, model, opts);
  if (dual.converged && dual.pi.spectrum().values.minCoeff() > kNearBoundaryEigenvalue) return dual;
  if (dual.converged) {
    // Nearly singular Gibbs state: the dual is approaching the boundary slowly.
    ProjectionResult primal = detail::primal_project(rho, model, opts);
    if (!primal.converged || primal.constraint_residual > dual.constraint_residual + opts.tol) return dual;
    primal.notes.insert(primal.notes.begin(), "dual projection nearly singular; refined with primal");
    return primal;
  }
  ProjectionResult primal = detail::primal_project(rho, model, opts);
  primal.notes.insert(primal.notes.begin(), "dual solver did not converge; used primal");
  if (!primal.converged && dual.constraint_residual < primal.constraint_residual) return dual;
  return primal;
}

inline ProjectionResult require_converged(ProjectionResult r, const char* what) {
  if (!r.converged)
    throw ConvergenceError(std::string(what) + ": projection did not converge (residual " +
                           std::to_string(r.constraint_residual) + ")");
  return r;
}

/// d_E(rho) = H(pi_E(rho)) - H(rho).
inline double divergence_from_model(const DensityMatrix& rho, const HierarchicalModelSpec& model,
                                    const ProjectionOptions& opts = {}) {
  return require_converged(maxent_project(rho, model, opts), "divergence_from_model").divergence;
}

/// c_k: divergence from the model of k-local Hamiltonians.
inline double correlation_ck(const DensityMatrix& rho, int k, const ProjectionOptions& opts = {}) {
  const int n = rho.shape().units();
  if (k < 1 || k > n) throw InvalidArgument("correlation_ck: k must satisfy 1 <= k <= N");
  if (k == n) return 0.0;
  return divergence_from_model(rho, build_model(rho.shape(), hypergraph_k(n, k)), opts);
}

/// I(rho) = sum_i H(rho_i) - H(rho).
inline double multi_information(const DensityMatrix& rho) {
  if (rho.shape().units() < 2) throw InvalidArgument("multi_information: need at least two units");
  double s = -von_neumann_entropy(rho);
  for (int i = 0; i < rho.shape().units(); ++i) s += von_neumann_entropy(marginal(rho, UnitSet::of({i})));
  return std::max(0.0, s);
}

/// Projections onto U_1, ..., U_N with the resulting c_k and C_k.
struct Decomposition {
  std::vector<ProjectionResult> projections;  ///< index k-1 holds pi_k
  std::vector<double> c;                      ///< c[k-1] = c_k
  std::vector<double> C_difference;           ///< C[k-2] = c_{k-1} - c_k, k = 2..N
  std::vector<double> C_divergence;           ///< C[k-2] = D(pi_k, pi_{k-1})
  double sum_C = 0.0;
};

inline Decomposition decompose(const DensityMatrix& rho, const ProjectionOptions& opts = {}) {
  const int n = rho.shape().units();
  if (n < 2) throw InvalidArgument("decompose: need at least two units");
  Decomposition out;
  for (int k = 1; k <= n; ++k) {
    const HierarchicalModelSpec model = build_model(rho.shape(), hypergraph_k(n, k));
    out.projections.push_back(require_converged(maxent_project(rho, model, opts), "decompose"));
    out.c.push_back(k == n ? 0.0 : out.projections.back().divergence);
  }
  for (int k = 2; k <= n; ++k) {
    out.C_difference.push_back(out.c[k - 2] - out.c[k - 1]);
    out.C_divergence.push_back(relative_entropy(out.projections[k - 1].pi, out.projections[k - 2].pi));
    out.sum_C += out.C_difference.back();
  }
  return out;
}

struct IrreducibleCorrelation {
  double from_difference = 0.0;  ///< c_{k-1} - c_k
  double from_divergence = 0.0;  ///< D(pi_k, pi_{k-1})
};

/// C_k for 2 <= k <= N, by both formulas.
inline IrreducibleCorrelation irreducible_Ck(const DensityMatrix& rho, int k, const ProjectionOptions& opts = {}) {
  const int n = rho.shape().units();
  if (k < 2 || k > n) throw InvalidArgument("irreducible_Ck: k must satisfy 2 <= k <= N");
  auto project = [&](int kk) {
    return require_converged(maxent_project(rho, build_model(rho.shape(), hypergraph_k(n, kk)), opts),
                             "irreducible_Ck");
  };
  const ProjectionResult hi = project(k);
  const ProjectionResult lo = project(k - 1);
  const double c_hi = k == n ? 0.0 : hi.divergence;
  return {lo.divergence - c_hi, relative_entropy(hi.pi, lo.pi)};
}

struct PythagoreanCheck {
  double residual = 0.0;
  double d_rho_sigma = 0.0;
  double d_rho_pi = 0.0;
  double d_pi_sigma = 0.0;
  bool infinite = false;
};

/// |D(rho, sigma) - D(rho, pi) - D(pi, sigma)| for sigma in the model closure.
inline PythagoreanCheck pythagorean_residual(const DensityMatrix& rho, const DensityMatrix& sigma,
                                             const ProjectionResult& projection) {
  PythagoreanCheck out;
  out.d_rho_sigma = relative_entropy(rho, sigma);
  out.d_rho_pi = relative_entropy(rho, projection.pi);
  out.d_pi_sigma = relative_entropy(projection.pi, sigma);
  if (!std::isfinite(out.d_rho_sigma) || !std::isfinite(out.d_rho_pi) || !std::isfinite(out.d_pi_sigma)) {
    out.infinite = true;
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  out.residual = std::abs(out.d_rho_sigma - out.d_rho_pi - out.d_pi_sigma);
  return out;
}

inline PythagoreanCheck pythagorean_residual(const DensityMatrix& rho, const DensityMatrix& sigma,
                                             const HierarchicalModelSpec& model, const ProjectionOptions& opts = {}) {
  return pythagorean_residual(rho, sigma, require_converged(maxent_project(rho, model, opts), "pythagorean_residual"));
}

/// gibbs_map(sum_j theta_j b_j) over the non-identity elements.
inline DensityMatrix gibbs_state(const HierarchicalModelSpec& model, const RVector& theta) {
  const auto m1 = static_cast<Eigen::Index>(model.size()) - 1;
  if (theta.size() != m1) throw InvalidArgument("gibbs_state: expected " + std::to_string(m1) + " parameters");
  RVector full(m1 + 1);
  full(0) = 0.0;
  full.tail(m1) = theta;
  return gibbs_map(HermitianObservable(model.shape(), model.combination(full)));
}

}  // namespace hmdiv
