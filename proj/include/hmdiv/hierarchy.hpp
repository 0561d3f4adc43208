#pragma once

// Hypergraphs on the unit set and the hierarchical model subspaces they
// generate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hmdiv/errors.hpp"
#include "hmdiv/linalg.hpp"
#include "hmdiv/shape.hpp"
#include "hmdiv/unit_basis.hpp"

namespace hmdiv {

/// Downward-closed family of subsets of {0..N-1} covering every unit.
/// Sets are kept in canonical order, so the empty set comes first.
class Hypergraph {
 public:
  Hypergraph() = default;

  int units() const { return n_; }
  const std::vector<UnitSet>& sets() const { return sets_; }
  std::size_t size() const { return sets_.size(); }

  bool contains(UnitSet v) const { return std::find(sets_.begin(), sets_.end(), v) != sets_.end(); }

  /// Sets not strictly contained in another member.
  std::vector<UnitSet> maximal_sets() const {
    std::vector<UnitSet> out;
    for (UnitSet v : sets_) {
      const bool dominated =
          std::any_of(sets_.begin(), sets_.end(), [&](UnitSet w) { return w != v && v.subset_of(w); });
      if (!dominated) out.push_back(v);
    }
    return out;
  }

  /// Largest set size.
  int order() const {
    int k = 0;
    for (UnitSet v : sets_) k = std::max(k, v.size());
    return k;
  }

  bool is_power_set() const { return sets_.size() == (std::size_t{1} << n_); }

  bool subset_of(const Hypergraph& other) const {
    return n_ == other.n_ &&
           std::all_of(sets_.begin(), sets_.end(), [&](UnitSet v) { return other.contains(v); });
  }

  std::string to_string() const {
    std::string s = "{";
    for (std::size_t i = 0; i < sets_.size(); ++i) s += (i ? "," : "") + sets_[i].to_string();
    return s + "}";
  }

  friend bool operator==(const Hypergraph&, const Hypergraph&) = default;

 private:
  friend Hypergraph make_hypergraph_unchecked(int n, std::vector<UnitSet> sets);
  int n_ = 0;
  std::vector<UnitSet> sets_;
};

inline Hypergraph make_hypergraph_unchecked(int n, std::vector<UnitSet> sets) {
  std::sort(sets.begin(), sets.end(), canonical_less);
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  Hypergraph h;
  h.n_ = n;
  h.sets_ = std::move(sets);
  return h;
}

namespace detail {

inline std::vector<UnitSet> downward_closure(const std::vector<UnitSet>& gens) {
  std::vector<UnitSet> out;
  for (UnitSet g : gens) {
    // Enumerate all submasks of g.
    const std::uint32_t bits = g.bits();
    std::uint32_t sub = bits;
    while (true) {
      out.emplace_back(sub);
      if (sub == 0) break;
      sub = (sub - 1) & bits;
    }
  }
  out.emplace_back(0u);
  return out;
}

}  // namespace detail

/// Validates a family of subsets (0-based unit indices). With `generators`
/// set the input is read as the maximal sets and closed downward.
inline Hypergraph validate_hypergraph(int n, const std::vector<std::vector<int>>& sets, bool generators = false) {
  if (n < 1 || n > UnitSet::kMaxUnits) throw InvalidHypergraph("hypergraph: N must be in [1, 31]");
  std::vector<UnitSet> family;
  for (const auto& s : sets) {
    for (int u : s)
      if (u < 0 || u >= n)
        throw InvalidSubsystem("hypergraph: unit index " + std::to_string(u) + " out of range for N=" +
                               std::to_string(n));
    family.push_back(UnitSet::of(s));
  }
  if (generators) family = detail::downward_closure(family);

  UnitSet cover;
  for (UnitSet v : family) cover = cover | v;
  if (cover != UnitSet::first(n))
    throw InvalidHypergraph("hypergraph does not cover all " + std::to_string(n) + " units");

  if (!generators) {
    if (std::find(family.begin(), family.end(), UnitSet()) == family.end())
      throw InvalidHypergraph("hypergraph is not downward closed: missing the empty set");
    for (UnitSet v : family)
      for (int i : v.members())
        if (std::find(family.begin(), family.end(), v.without(i)) == family.end())
          throw InvalidHypergraph("hypergraph is not downward closed: " + v.to_string() + " present but " +
                                  v.without(i).to_string() + " missing");
  }
  return make_hypergraph_unchecked(n, std::move(family));
}

/// U_k: all subsets of size at most k.
inline Hypergraph hypergraph_k(int n, int k) {
  if (n < 1 || n > 20) throw InvalidArgument("hypergraph_k: N out of range");
  if (k < 1 || k > n) throw InvalidArgument("hypergraph_k: k must satisfy 1 <= k <= N");
  std::vector<UnitSet> sets;
  for (std::uint32_t b = 0; b < (1u << n); ++b)
    if (std::popcount(b) <= k) sets.emplace_back(b);
  return make_hypergraph_unchecked(n, std::move(sets));
}

/// Every hypergraph on N units (N <= 4).
inline std::vector<Hypergraph> enumerate_hypergraphs(int n) {
  if (n < 1 || n > 4) throw GuardExceeded("enumerate_hypergraphs: N must be in [1, 4]");
  const std::uint32_t subsets = 1u << n;
  const UnitSet all = UnitSet::first(n);
  std::vector<Hypergraph> out;
  // A family is a bitmask over the 2^N subsets; bit 0 (the empty set) is forced.
  for (std::uint64_t fam = 1; fam < (std::uint64_t{1} << subsets); fam += 2) {
    bool closed = true;
    UnitSet cover;
    for (std::uint32_t s = 1; s < subsets && closed; ++s) {
      if (!((fam >> s) & 1u)) continue;
      cover = cover | UnitSet(s);
      for (std::uint32_t t = s; t; t &= t - 1) {
        const std::uint32_t drop = s & ~(t & -t);
        if (!((fam >> drop) & 1u)) {
          closed = false;
          break;
        }
      }
    }
    if (!closed || cover != all) continue;
    std::vector<UnitSet> sets;
    for (std::uint32_t s = 0; s < subsets; ++s)
      if ((fam >> s) & 1u) sets.emplace_back(s);
    out.push_back(make_hypergraph_unchecked(n, std::move(sets)));
  }
  return out;
}

/// Complex dimension of the pure factor space of v: product of (dim A_i - 1).
inline std::size_t pure_factor_dim(const SystemShape& shape, UnitSet v) {
  shape.check_subset(v);
  std::size_t d = 1;
  for (int i : v.members()) d *= shape.algebra_dim(i) - 1;
  return d;
}

struct ModelDims {
  std::size_t total = 0;  ///< dimension of the model subspace (includes the identity)
  std::size_t model = 0;  ///< dimension of the Gibbs family, total - 1
};

inline ModelDims model_dim(const SystemShape& shape, const Hypergraph& u) {
  if (u.units() != shape.units())
    throw ShapeMismatch("hypergraph on " + std::to_string(u.units()) + " units for shape " + shape.to_string());
  ModelDims dims;
  for (UnitSet v : u.sets()) dims.total += pure_factor_dim(shape, v);
  dims.model = dims.total - 1;
  return dims;
}

/// One tensor-product basis element: factor index into the unit basis per
/// unit; 0 (the normalized identity) exactly outside `pattern`.
struct BasisElement {
  UnitSet pattern;
  std::vector<int> factors;
};

struct BuildOptions {
  bool materialize = true;  ///< keep dense d x d matrices of all elements
  bool verify = true;       ///< certify orthonormality (throws std::logic_error on failure)
};

/// Orthonormal self-adjoint basis of a hierarchical model subspace.
class HierarchicalModelSpec {
 public:
  const SystemShape& shape() const { return shape_; }
  const Hypergraph& hypergraph() const { return hypergraph_; }
  const std::vector<BasisElement>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  std::size_t dim_total() const { return elements_.size(); }
  std::size_t dim_model() const { return elements_.size() - 1; }
  const std::vector<CMatrix>& unit_basis(int i) const { return unit_bases_[i]; }
  bool materialized() const { return !dense_.empty() || elements_.empty(); }

  /// Largest |G - I| entry found during verification (negative if not run).
  double orthonormality_error() const { return orthonormality_error_; }

  /// Dense matrix of element j; computed on demand when not materialized.
  CMatrix element(std::size_t j) const {
    if (!dense_.empty()) return dense_[j];
    return assemble(elements_[j]);
  }

  /// Dense matrices of all elements (materialized copy).
  const std::vector<CMatrix>& dense() const {
    if (dense_.empty() && !elements_.empty()) throw GuardExceeded("model basis was built without materialization");
    return dense_;
  }

  /// Diagonals of all elements, rows = elements; only for all-classical shapes.
  const RMatrix& diagonals() const {
    if (!shape_.all_classical()) throw InvalidArgument("diagonals: shape has quantum units");
    return diagonals_;
  }

  /// Expectations <b_j, rho> of a Hermitian matrix against every element.
  RVector coordinates(const CMatrix& h) const {
    RVector out(static_cast<Eigen::Index>(size()));
    if (shape_.all_classical()) {
      const RVector diag = h.diagonal().real();
      return diagonals_ * diag;
    }
    for (std::size_t j = 0; j < size(); ++j) out(static_cast<Eigen::Index>(j)) = hs_real(element(j), h);
    return out;
  }

  /// Sum of theta_j b_j.
  CMatrix combination(const RVector& theta) const {
    const auto d = static_cast<Eigen::Index>(shape_.dim());
    CMatrix h = CMatrix::Zero(d, d);
    if (shape_.all_classical()) {
      const RVector diag = diagonals_.transpose() * theta;
      for (Eigen::Index i = 0; i < d; ++i) h(i, i) = diag(i);
      return h;
    }
    for (std::size_t j = 0; j < size(); ++j) h += theta(static_cast<Eigen::Index>(j)) * element(j);
    return h;
  }

  /// Orthogonal projection onto the model subspace.
  CMatrix project(const CMatrix& h) const { return combination(coordinates(h)); }

  CMatrix assemble(const BasisElement& e) const {
    CMatrix m = CMatrix::Ones(1, 1);
    for (int i = 0; i < shape_.units(); ++i) m = kron(m, unit_bases_[i][e.factors[i]]);
    return m;
  }

 private:
  friend HierarchicalModelSpec build_model(const SystemShape&, const Hypergraph&, BuildOptions);
  SystemShape shape_;
  Hypergraph hypergraph_;
  std::vector<std::vector<CMatrix>> unit_bases_;
  std::vector<BasisElement> elements_;
  std::vector<CMatrix> dense_;
  RMatrix diagonals_;
  double orthonormality_error_ = -1.0;
};

/// Certificate that the Gram matrix of the model basis is close enough to
/// the identity to have full rank. Gram entries of tensor products are the
/// products of the unit Gram entries, so no d x d matrix is formed.
struct GramCertificate {
  double max_offdiag = 0.0;     ///< largest |G_ab|, a != b
  double max_diag_error = 0.0;  ///< largest |G_aa - 1|
  double gershgorin_radius = 0.0;
  bool full_rank = false;       ///< every Gershgorin disc excludes zero
};

inline GramCertificate gram_certificate(const HierarchicalModelSpec& model) {
  const SystemShape& shape = model.shape();
  std::vector<CMatrix> unit_gram;
  for (int i = 0; i < shape.units(); ++i) unit_gram.push_back(gram_matrix(model.unit_basis(i)));
  const auto& el = model.elements();
  GramCertificate cert;
  double worst_lower = 1.0;
  for (std::size_t a = 0; a < el.size(); ++a) {
    double radius = 0.0;
    cplx diag = 1.0;
    for (std::size_t b = 0; b < el.size(); ++b) {
      cplx g = 1.0;
      for (int i = 0; i < shape.units(); ++i) g *= unit_gram[i](el[a].factors[i], el[b].factors[i]);
      if (a == b) {
        diag = g;
      } else {
        radius += std::abs(g);
        cert.max_offdiag = std::max(cert.max_offdiag, std::abs(g));
      }
    }
    cert.max_diag_error = std::max(cert.max_diag_error, std::abs(diag - 1.0));
    cert.gershgorin_radius = std::max(cert.gershgorin_radius, radius);
    worst_lower = std::min(worst_lower, diag.real() - radius);
  }
  cert.full_rank = worst_lower > 0.0;
  return cert;
}

/// Numerical rank of the dense element matrices (eigenvalues of the Gram
/// matrix above `relative_tol` times the largest).
inline std::size_t dense_rank(const std::vector<CMatrix>& elements, double relative_tol = 1e-10) {
  if (elements.empty()) return 0;
  const CMatrix g = gram_matrix(elements);
  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(g, Eigen::EigenvaluesOnly).eigenvalues();
  const double top = ev.maxCoeff();
  return static_cast<std::size_t>((ev.array() > relative_tol * top).count());
}

/// Tensor-product basis of the model subspace: for each v in U (canonical
/// order) every choice of non-identity unit factors on v, identity elsewhere.
/// Element 0 is 1/sqrt(d).
inline HierarchicalModelSpec build_model(const SystemShape& shape, const Hypergraph& u, BuildOptions opts = {}) {
  if (u.units() != shape.units())
    throw ShapeMismatch("hypergraph on " + std::to_string(u.units()) + " units for shape " + shape.to_string());
  HierarchicalModelSpec spec;
  spec.shape_ = shape;
  spec.hypergraph_ = u;
  for (int i = 0; i < shape.units(); ++i) spec.unit_bases_.push_back(unit_basis(shape.size(i), shape.kind(i)));

  for (UnitSet v : u.sets()) {
    const auto members = v.members();
    std::vector<int> factors(static_cast<std::size_t>(shape.units()), 0);
    for (int i : members) factors[i] = 1;
    // Odometer over factor indices 1..a_i-1, last member fastest.
    bool empty_range = std::any_of(members.begin(), members.end(),
                                   [&](int i) { return shape.algebra_dim(i) < 2; });
    while (!empty_range) {
      spec.elements_.push_back(BasisElement{v, factors});
      int pos = static_cast<int>(members.size()) - 1;
      while (pos >= 0) {
        const int i = members[pos];
        if (++factors[i] < static_cast<int>(shape.algebra_dim(i))) break;
        factors[i] = 1;
        --pos;
      }
      if (pos < 0) break;
    }
  }

  const std::size_t d = shape.dim();
  if (opts.materialize) {
    constexpr std::size_t kMaxEntries = std::size_t{1} << 26;
    if (spec.elements_.size() * d * d > kMaxEntries)
      throw GuardExceeded("build_model: dense basis would need " + std::to_string(spec.elements_.size() * d * d) +
                          " entries");
    spec.dense_.reserve(spec.elements_.size());
    for (const auto& e : spec.elements_) spec.dense_.push_back(spec.assemble(e));
  }
  if (shape.all_classical()) {
    spec.diagonals_.resize(static_cast<Eigen::Index>(spec.elements_.size()), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < spec.elements_.size(); ++j) {
      RVector diag = RVector::Ones(1);
      for (int i = 0; i < shape.units(); ++i) {
        const RVector f = spec.unit_bases_[i][spec.elements_[j].factors[i]].diagonal().real();
        RVector next(diag.size() * f.size());
        for (Eigen::Index a = 0; a < diag.size(); ++a) next.segment(a * f.size(), f.size()) = diag(a) * f;
        diag = std::move(next);
      }
      spec.diagonals_.row(static_cast<Eigen::Index>(j)) = diag.transpose();
    }
  }
  if (opts.verify) {
    const GramCertificate cert = gram_certificate(spec);
    spec.orthonormality_error_ = std::max(cert.max_offdiag, cert.max_diag_error);
    if (!cert.full_rank || spec.orthonormality_error_ > 1e-12)
      throw std::logic_error("build_model: assembled basis failed the orthonormality check");
  }
  return spec;
}

/// Maximum distance of any element of `inner` from the span of `outer`.
inline double containment_residual(const HierarchicalModelSpec& inner, const HierarchicalModelSpec& outer) {
  double worst = 0.0;
  for (std::size_t j = 0; j < inner.size(); ++j) {
    const CMatrix b = inner.element(j);
    worst = std::max(worst, (b - outer.project(b)).norm());
  }
  return worst;
}

}  // namespace hmdiv
