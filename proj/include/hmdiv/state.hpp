#pragma once

// States, observables and the basic information quantities on the
// tensor-product algebra A_1 (x) ... (x) A_N.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hmdiv/errors.hpp"
#include "hmdiv/linalg.hpp"
#include "hmdiv/shape.hpp"

namespace hmdiv {

namespace detail {

/// Index of the classical part of each configuration; entries of an algebra
/// element vanish unless row and column agree on it.
inline std::vector<std::size_t> classical_keys(const SystemShape& shape) {
  const std::size_t d = shape.dim();
  std::vector<std::size_t> keys(d, 0);
  if (shape.all_quantum()) return keys;
  for (std::size_t x = 0; x < d; ++x) {
    const auto dig = shape.digits(x);
    std::size_t key = 0;
    for (int i = 0; i < shape.units(); ++i)
      if (shape.kind(i) == UnitKind::classical) key = key * static_cast<std::size_t>(shape.size(i)) + dig[i];
    keys[x] = key;
  }
  return keys;
}

/// Largest magnitude of an entry that the block structure forces to zero.
inline double algebra_violation(const SystemShape& shape, const CMatrix& m) {
  if (shape.all_quantum()) return 0.0;
  const auto keys = classical_keys(shape);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (keys[i] != keys[j]) worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

inline void check_square(const SystemShape& shape, const CMatrix& m, const char* what) {
  const auto d = static_cast<Eigen::Index>(shape.dim());
  if (m.rows() != d || m.cols() != d) {
    throw InvalidState(std::string(what) + ": expected " + std::to_string(d) + "x" + std::to_string(d) +
                       " matrix for shape " + shape.to_string() + ", got " + std::to_string(m.rows()) + "x" +
                       std::to_string(m.cols()));
  }
}

}  // namespace detail

/// Self-adjoint element of the composite algebra.
class HermitianObservable {
 public:
  HermitianObservable(SystemShape shape, CMatrix entries) : shape_(std::move(shape)), m_(std::move(entries)) {
    detail::check_square(shape_, m_, "observable");
    if (hermitian_deviation(m_) > tol::hermitian) throw InvalidState("observable is not Hermitian");
    if (detail::algebra_violation(shape_, m_) > tol::hermitian)
      throw InvalidState("observable has off-diagonal entries on classical units");
  }

  static HermitianObservable zero(const SystemShape& shape) {
    const auto d = static_cast<Eigen::Index>(shape.dim());
    return HermitianObservable(shape, CMatrix::Zero(d, d));
  }

  const SystemShape& shape() const { return shape_; }
  const CMatrix& matrix() const { return m_; }

 private:
  SystemShape shape_;
  CMatrix m_;
};

/// Hermitian, positive semidefinite, unit-trace element of the composite algebra.
class DensityMatrix {
 public:
  DensityMatrix(SystemShape shape, CMatrix entries) : shape_(std::move(shape)), m_(std::move(entries)) {
    detail::check_square(shape_, m_, "state");
    if (hermitian_deviation(m_) > tol::hermitian) throw InvalidState("state is not Hermitian");
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > tol::trace)
      throw InvalidState("state trace is " + std::to_string(tr) + ", expected 1");
    if (detail::algebra_violation(shape_, m_) > tol::hermitian)
      throw InvalidState("state has coherences between classical configurations");
    const double lmin = hermitian_spectrum(m_).values.minCoeff();
    if (lmin < -tol::psd) throw InvalidState("state has negative eigenvalue " + std::to_string(lmin));
  }

  /// Hermitizes, strips forbidden classical coherences and rescales to unit
  /// trace before validating. For solver outputs that carry rounding noise.
  static DensityMatrix normalized(SystemShape shape, CMatrix m) {
    detail::check_square(shape, m, "state");
    m = hermitian_part(m);
    if (!shape.all_quantum()) {
      const auto keys = detail::classical_keys(shape);
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
          if (keys[i] != keys[j]) m(i, j) = 0.0;
    }
    const double tr = m.trace().real();
    if (!(tr > 0.0)) throw InvalidState("cannot normalize a matrix with non-positive trace");
    m /= tr;
    return DensityMatrix(std::move(shape), std::move(m));
  }

  static DensityMatrix from_probabilities(SystemShape shape, std::span<const double> p) {
    if (p.size() != shape.dim())
      throw InvalidState("expected " + std::to_string(shape.dim()) + " probabilities, got " +
                         std::to_string(p.size()));
    const auto d = static_cast<Eigen::Index>(p.size());
    CMatrix m = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (p[i] < -tol::psd) throw InvalidState("negative probability");
      m(i, i) = std::max(0.0, p[i]);
    }
    return DensityMatrix(std::move(shape), std::move(m));
  }

  static DensityMatrix from_probabilities(SystemShape shape, const RVector& p) {
    return from_probabilities(std::move(shape), std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
  }

  /// |psi><psi| / <psi|psi>.
  static DensityMatrix from_pure(SystemShape shape, const CVector& psi) {
    const double n2 = psi.squaredNorm();
    if (!(n2 > 0.0)) throw InvalidState("zero state vector");
    return DensityMatrix::normalized(std::move(shape), psi * psi.adjoint() / n2);
  }

  static DensityMatrix maximally_mixed(SystemShape shape) {
    const auto d = static_cast<Eigen::Index>(shape.dim());
    CMatrix m = CMatrix::Identity(d, d) / static_cast<double>(d);
    return DensityMatrix(std::move(shape), std::move(m));
  }

  const SystemShape& shape() const { return shape_; }
  const CMatrix& matrix() const { return m_; }
  std::size_t dim() const { return shape_.dim(); }
  RVector probabilities() const { return m_.diagonal().real(); }
  Spectrum spectrum() const { return hermitian_spectrum(m_); }

 private:
  SystemShape shape_;
  CMatrix m_;
};

/// Kronecker product; dimensions multiply.
inline CMatrix tensor(const CMatrix& a, const CMatrix& b) { return kron(a, b); }

inline SystemShape concat(const SystemShape& a, const SystemShape& b) {
  auto sizes = a.sizes();
  auto kinds = a.kinds();
  sizes.insert(sizes.end(), b.sizes().begin(), b.sizes().end());
  kinds.insert(kinds.end(), b.kinds().begin(), b.kinds().end());
  return SystemShape(std::move(sizes), std::move(kinds));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::normalized(concat(a.shape(), b.shape()), kron(a.matrix(), b.matrix()));
}

/// Partial trace of an arbitrary square matrix over the units outside nu.
inline CMatrix partial_trace_keep(const SystemShape& shape, const CMatrix& m, UnitSet nu) {
  shape.check_subset(nu);
  const auto strides = shape.strides();
  // Offsets of the kept and traced digits inside the full index.
  auto offsets = [&](bool kept) {
    std::vector<std::size_t> out{0};
    for (int i = 0; i < shape.units(); ++i) {
      if (nu.contains(i) != kept) continue;
      std::vector<std::size_t> next;
      next.reserve(out.size() * static_cast<std::size_t>(shape.size(i)));
      for (std::size_t base : out)
        for (int a = 0; a < shape.size(i); ++a) next.push_back(base + static_cast<std::size_t>(a) * strides[i]);
      out = std::move(next);
    }
    return out;
  };
  const auto kept = offsets(true);
  const auto traced = offsets(false);
  const auto dk = static_cast<Eigen::Index>(kept.size());
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      cplx s = 0.0;
      for (std::size_t c : traced) s += m(static_cast<Eigen::Index>(kept[a] + c), static_cast<Eigen::Index>(kept[b] + c));
      out(a, b) = s;
    }
  return out;
}

/// The nu-marginal: the state on A_nu with <rho_nu, a> = <rho, a (x) 1>.
/// The empty subset gives the 1x1 state [1].
inline DensityMatrix marginal(const DensityMatrix& rho, UnitSet nu) {
  return DensityMatrix::normalized(rho.shape().restrict_to(nu), partial_trace_keep(rho.shape(), rho.matrix(), nu));
}

/// Shannon entropy (nats) of a spectrum; values are clipped to [0, 1].
inline double entropy_of_spectrum(const RVector& values) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double p = std::clamp(values(i), 0.0, 1.0);
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

/// H(rho) = -tr rho log rho in nats, with 0 log 0 = 0.
inline double von_neumann_entropy(const DensityMatrix& rho) {
  return entropy_of_spectrum(rho.spectrum().values);
}

/// Umegaki relative entropy D(rho, sigma) = tr rho (log rho - log sigma),
/// +infinity unless ker sigma is contained in ker rho.
inline double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.shape() == sigma.shape()))
    throw ShapeMismatch("relative_entropy: shapes " + rho.shape().to_string() + " and " + sigma.shape().to_string());
  const Spectrum s = sigma.spectrum();
  const double smax = s.values.maxCoeff();
  const double threshold = tol::kernel_relative * smax;
  // Diagonal of rho in the eigenbasis of sigma.
  const CMatrix rt = s.vectors.adjoint() * rho.matrix() * s.vectors;
  double kernel_mass = 0.0;
  double cross = 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    const double w = rt(i, i).real();
    if (s.values(i) <= threshold) {
      kernel_mass += w;
    } else {
      cross += w * std::log(s.values(i));
    }
  }
  if (kernel_mass > tol::kernel_mass) return std::numeric_limits<double>::infinity();
  const double d = -von_neumann_entropy(rho) - cross;
  return std::max(0.0, d);
}

/// <a, rho> for a Hermitian a; real.
inline double expectation(const DensityMatrix& rho, const CMatrix& a) { return hs_real(a, rho.matrix()); }

/// log tr e^a, computed on the centered spectrum.
inline double log_partition(const RVector& eigenvalues) {
  const double top = eigenvalues.maxCoeff();
  return top + std::log((eigenvalues.array() - top).exp().sum());
}

/// R(a) = e^a / tr e^a. The spectrum is shifted by its maximum before
/// exponentiation, so R(a + c 1) = R(a) holds to rounding.
inline DensityMatrix gibbs_map(const HermitianObservable& a) {
  const Spectrum s = hermitian_spectrum(a.matrix());
  const double top = s.values.maxCoeff();
  RVector w = (s.values.array() - top).exp().matrix();
  w /= w.sum();
  return DensityMatrix::normalized(a.shape(), from_spectrum(s.vectors, w));
}

/// log of a positive semidefinite matrix on its support (eigenvalues above
/// `relative_threshold * max`); zero on the kernel.
inline CMatrix log_on_support(const CMatrix& m, double relative_threshold = tol::kernel_relative) {
  const Spectrum s = hermitian_spectrum(m);
  const double cut = relative_threshold * s.values.maxCoeff();
  RVector l(s.values.size());
  for (Eigen::Index i = 0; i < l.size(); ++i) l(i) = s.values(i) > cut ? std::log(s.values(i)) : 0.0;
  return from_spectrum(s.vectors, l);
}

/// Number of eigenvalues above an absolute threshold.
inline int numerical_rank(const DensityMatrix& rho, double threshold = 1e-9) {
  const RVector v = rho.spectrum().values;
  return static_cast<int>((v.array() > threshold).count());
}

}  // namespace hmdiv
