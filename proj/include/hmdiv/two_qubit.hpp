#pragma once

// Bell-diagonal two-qubit states: correlation vector t, Bell weights lambda,
// separability and the separable maximizers of mutual information.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hmdiv/errors.hpp"
#include "hmdiv/linalg.hpp"
#include "hmdiv/random.hpp"
#include "hmdiv/state.hpp"

namespace hmdiv {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

/// Pauli matrices sigma_1..3 (index 0..2).
inline const std::array<CMatrix, 3>& pauli() {
  static const std::array<CMatrix, 3> p = [] {
    std::array<CMatrix, 3> m;
    const cplx i(0.0, 1.0);
    m[0] = CMatrix(2, 2);
    m[0] << 0.0, 1.0, 1.0, 0.0;
    m[1] = CMatrix(2, 2);
    m[1] << 0.0, -i, i, 0.0;
    m[2] = CMatrix(2, 2);
    m[2] << 1.0, 0.0, 0.0, -1.0;
    return m;
  }();
  return p;
}

/// Bell vectors psi_1..psi_4 (index 0..3): (00+11), (00-11), (01+10), (01-10), over sqrt 2.
inline const std::array<CVector, 4>& bell_basis() {
  static const std::array<CVector, 4> b = [] {
    const double r = 1.0 / std::sqrt(2.0);
    std::array<CVector, 4> v;
    for (auto& x : v) x = CVector::Zero(4);
    v[0](0) = r, v[0](3) = r;
    v[1](0) = r, v[1](3) = -r;
    v[2](1) = r, v[2](2) = r;
    v[3](1) = r, v[3](2) = -r;
    return v;
  }();
  return b;
}

/// s_i(j) = <psi_i| sigma_j (x) sigma_j |psi_i>, so that
/// 1/4 (1 + sum_j t_j sigma_j (x) sigma_j) has eigenvalue (1 + s_i . t)/4 on psi_i.
inline const std::array<Vec3, 4>& bell_signs() {
  static const std::array<Vec3, 4> s = [] {
    std::array<Vec3, 4> out;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 3; ++j) {
        const CMatrix ss = kron(pauli()[j], pauli()[j]);
        out[i](j) = std::round((bell_basis()[i].adjoint() * ss * bell_basis()[i])(0, 0).real());
      }
    return out;
  }();
  return s;
}

struct BellDiagonal {
  Vec3 t;
  Vec4 lambda;
};

inline Vec4 lambda_from_t(const Vec3& t) {
  Vec4 l;
  for (int i = 0; i < 4; ++i) l(i) = 0.25 * (1.0 + bell_signs()[i].dot(t));
  return l;
}

inline Vec3 t_from_lambda(const Vec4& l) {
  Vec3 t = Vec3::Zero();
  for (int i = 0; i < 4; ++i) t += l(i) * bell_signs()[i];
  return t;
}

inline BellDiagonal bell_from_t(const Vec3& t) {
  const Vec4 l = lambda_from_t(t);
  if (l.minCoeff() < -1e-12) {
    std::ostringstream os;
    os << "t = (" << t(0) << ", " << t(1) << ", " << t(2) << ") is not a state: Bell weight " << l.minCoeff();
    throw InvalidState(os.str());
  }
  return {t, l};
}

inline BellDiagonal bell_from_lambda(const Vec4& l) {
  if (l.minCoeff() < -1e-12) throw InvalidState("Bell weights must be nonnegative");
  if (std::abs(l.sum() - 1.0) > 1e-12) throw InvalidState("Bell weights must sum to 1");
  return {t_from_lambda(l), l};
}

/// 1/4 (1 + sum_j t_j sigma_j (x) sigma_j).
inline CMatrix bell_matrix(const Vec3& t) {
  CMatrix m = CMatrix::Identity(4, 4);
  for (int j = 0; j < 3; ++j) m += t(j) * kron(pauli()[j], pauli()[j]);
  return 0.25 * m;
}

inline DensityMatrix bell_state(const BellDiagonal& b) {
  return DensityMatrix(SystemShape::qubits(2), bell_matrix(b.t));
}

struct SeparabilityCheck {
  bool separable = false;  ///< all lambda_i <= 1/2
  bool by_t = false;       ///< |t|_1 <= 1
  bool agree = false;
};

inline SeparabilityCheck separability(const BellDiagonal& b) {
  SeparabilityCheck c;
  c.separable = b.lambda.maxCoeff() <= 0.5 + 1e-12;
  c.by_t = b.t.lpNorm<1>() <= 1.0 + 1e-12;
  c.agree = c.separable == c.by_t;
  return c;
}

inline bool is_separable(const BellDiagonal& b) { return separability(b).separable; }

/// I = 2 log 2 - H(lambda); both marginals are maximally mixed.
inline double mutual_information_bd(const BellDiagonal& b) {
  return 2.0 * std::numbers::ln2 - entropy_of_spectrum(b.lambda);
}

/// Two product vectors a_k (x) b_k with rho = 1/2 sum_k |a_k b_k><a_k b_k|.
struct ProductForm {
  std::array<CVector, 2> a;
  std::array<CVector, 2> b;
  std::string label;  ///< e.g. "|+><+| x |+><+| + |-><-| x |-><-|"

  CMatrix matrix() const {
    CMatrix m = CMatrix::Zero(4, 4);
    for (int k = 0; k < 2; ++k) {
      const CVector v = kron(a[k], b[k]);
      m += 0.5 * v * v.adjoint();
    }
    return m;
  }
};

/// Single-qubit vectors |0>, |1>, |+>, |->, |0'> = (|0> + i|1>)/sqrt 2, |1'> = (|0> - i|1>)/sqrt 2.
namespace qubit {
inline CVector ket(cplx a, cplx b) {
  CVector v(2);
  v << a, b;
  return v;
}
inline CVector zero() { return ket(1.0, 0.0); }
inline CVector one() { return ket(0.0, 1.0); }
inline CVector plus() { return ket(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)); }
inline CVector minus() { return ket(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)); }
inline CVector zero_prime() { return ket(1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0))); }
inline CVector one_prime() { return ket(1.0 / std::sqrt(2.0), cplx(0.0, -1.0 / std::sqrt(2.0))); }
}  // namespace qubit

struct SeparableVertex {
  int i = 0;  ///< Bell indices (0-based), i < j
  int j = 0;
  BellDiagonal state;
  ProductForm product;  ///< classically correlated form of the vertex
};

/// The six vertices 1/2 (|psi_i><psi_i| + |psi_j><psi_j|) of the separable
/// octahedron, each with its product decomposition in the eigenbasis of the
/// one nonzero correlation sigma_k (x) sigma_k.
inline std::vector<SeparableVertex> separable_extreme_points() {
  using namespace qubit;
  struct Form {
    CVector a0, b0, a1, b1;
    const char* label;
  };
  // Indexed by the Bell pair, in the order (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
  const std::array<Form, 6> forms = {{
      {zero(), zero(), one(), one(), "|0><0| x |0><0| + |1><1| x |1><1|"},
      {plus(), plus(), minus(), minus(), "|+><+| x |+><+| + |-><-| x |-><-|"},
      {zero_prime(), one_prime(), one_prime(), zero_prime(), "|0'><0'| x |1'><1'| + |1'><1'| x |0'><0'|"},
      {one_prime(), one_prime(), zero_prime(), zero_prime(), "|1'><1'| x |1'><1'| + |0'><0'| x |0'><0'|"},
      {minus(), plus(), plus(), minus(), "|-><-| x |+><+| + |+><+| x |-><-|"},
      {zero(), one(), one(), zero(), "|0><0| x |1><1| + |1><1| x |0><0|"},
  }};
  std::vector<SeparableVertex> out;
  int f = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j, ++f) {
      Vec4 l = Vec4::Zero();
      l(i) = 0.5;
      l(j) = 0.5;
      SeparableVertex v;
      v.i = i;
      v.j = j;
      v.state = bell_from_lambda(l);
      v.product.a = {forms[f].a0, forms[f].a1};
      v.product.b = {forms[f].b0, forms[f].b1};
      v.product.label = forms[f].label;
      out.push_back(std::move(v));
    }
  return out;
}

/// Product eigenbasis witnessing that a Bell-diagonal state is diagonal
/// under local unitaries. Columns are e_a (x) e_b.
struct ClassicalCorrelation {
  bool classical = false;
  int axis = -1;          ///< index of the nonzero t component (-1 when t = 0)
  CMatrix witness;        ///< 4 x 4 unitary of product vectors (empty when not classical)
  double off_diagonal = 0.0;  ///< largest off-diagonal entry of witness* rho witness
};

/// Classically correlated iff at most one t_j is nonzero (|t_j| > 1e-10);
/// the witness is the product eigenbasis of sigma_j (x) sigma_j.
inline ClassicalCorrelation is_classically_correlated_bd(const BellDiagonal& b, double tol = 1e-10) {
  ClassicalCorrelation out;
  int nonzero = 0;
  for (int j = 0; j < 3; ++j)
    if (std::abs(b.t(j)) > tol) {
      ++nonzero;
      out.axis = j;
    }
  if (nonzero > 1) return out;
  out.classical = true;
  const int axis = out.axis < 0 ? 2 : out.axis;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(pauli()[axis]);
  const CMatrix e = es.eigenvectors();
  out.witness = CMatrix(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c) out.witness.col(2 * a + c) = kron(e.col(a), e.col(c));
  CMatrix diag = out.witness.adjoint() * bell_matrix(b.t) * out.witness;
  diag.diagonal().setZero();
  out.off_diagonal = diag.cwiseAbs().maxCoeff();
  return out;
}

/// Local unitary U_A (x) U_B carrying 1/2 (|00><00| + |11><11|) to a product
/// form: U_A|k> = a_k, U_B|k> = b_k.
inline CMatrix local_unitary_to(const ProductForm& f) {
  CMatrix ua(2, 2), ub(2, 2);
  ua.col(0) = f.a[0];
  ua.col(1) = f.a[1];
  ub.col(0) = f.b[0];
  ub.col(1) = f.b[1];
  return kron(ua, ub);
}

struct VertexCheck {
  SeparableVertex vertex;
  double mutual_information = 0.0;
  double product_form_error = 0.0;    ///< max |vertex - product form| entrywise
  double witness_off_diagonal = 0.0;  ///< from is_classically_correlated_bd
  bool classical = false;
  double local_unitary_error = 0.0;   ///< max |U rho_0 U* - vertex| entrywise
  double unitarity_error = 0.0;
};

struct SeparableBoundReport {
  int samples = 0;
  std::uint64_t seed = 0;
  double max_sampled_I = 0.0;
  Vec3 argmax_t = Vec3::Zero();
  int violations = 0;            ///< samples with I > log 2 + 1e-9
  int criteria_disagreements = 0;
  std::vector<VertexCheck> vertices;
  bool passed = false;
};

/// Uniform point of the octahedron |t|_1 <= 1 by rejection from the cube.
inline Vec3 sample_separable_t(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    Vec3 t(u(rng), u(rng), u(rng));
    if (t.lpNorm<1>() <= 1.0) return t;
  }
}

inline SeparableBoundReport verify_theorem1(int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidArgument("verify_theorem1: samples must be >= 1");
  SeparableBoundReport rep;
  rep.samples = samples;
  rep.seed = seed;
  const double log2 = std::numbers::ln2;
  Rng rng(seed);
  rep.max_sampled_I = -1.0;
  for (int s = 0; s < samples; ++s) {
    const BellDiagonal b = bell_from_t(sample_separable_t(rng));
    if (!separability(b).agree) ++rep.criteria_disagreements;
    const double i = mutual_information_bd(b);
    if (i > rep.max_sampled_I) {
      rep.max_sampled_I = i;
      rep.argmax_t = b.t;
    }
    if (i > log2 + 1e-9) ++rep.violations;
  }

  CMatrix rho0 = CMatrix::Zero(4, 4);
  rho0(0, 0) = 0.5;
  rho0(3, 3) = 0.5;
  bool vertices_ok = true;
  for (const SeparableVertex& v : separable_extreme_points()) {
    VertexCheck c;
    c.vertex = v;
    c.mutual_information = mutual_information_bd(v.state);
    const CMatrix m = bell_matrix(v.state.t);
    c.product_form_error = (m - v.product.matrix()).cwiseAbs().maxCoeff();
    const ClassicalCorrelation cc = is_classically_correlated_bd(v.state);
    c.classical = cc.classical;
    c.witness_off_diagonal = cc.off_diagonal;
    const CMatrix u = local_unitary_to(v.product);
    c.unitarity_error = (u.adjoint() * u - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff();
    c.local_unitary_error = (u * rho0 * u.adjoint() - m).cwiseAbs().maxCoeff();
    vertices_ok = vertices_ok && std::abs(c.mutual_information - log2) <= 1e-9 && c.product_form_error <= 1e-12 &&
                  c.classical && c.witness_off_diagonal <= 1e-10 && c.local_unitary_error <= 1e-12 &&
                  c.unitarity_error <= 1e-12;
    rep.vertices.push_back(std::move(c));
  }
  rep.passed = vertices_ok && rep.violations == 0 && rep.criteria_disagreements == 0;
  return rep;
}

struct GeometryPoint {
  std::string kind;  ///< tetrahedron, octahedron, center, grid
  Vec3 t;
  bool physical = false;
  bool separable = false;
  bool product = false;
  double mutual_information = std::numeric_limits<double>::quiet_NaN();
};

/// Points of the Bell-diagonal geometry: Bell states, separable vertices,
/// the maximally mixed center and a (grid+1)^3 lattice on [-1, 1]^3.
inline std::vector<GeometryPoint> fig1_geometry(int grid) {
  if (grid < 1) throw InvalidArgument("fig1: grid must be >= 1");
  std::vector<GeometryPoint> out;
  auto classify = [](std::string kind, const Vec3& t) {
    GeometryPoint p;
    p.kind = std::move(kind);
    p.t = t;
    const Vec4 l = lambda_from_t(t);
    p.physical = l.minCoeff() >= -1e-12;
    if (p.physical) {
      const BellDiagonal b{t, l};
      p.separable = is_separable(b);
      p.product = t.cwiseAbs().maxCoeff() <= 1e-12;
      p.mutual_information = mutual_information_bd(b);
    }
    return p;
  };
  for (int i = 0; i < 4; ++i) out.push_back(classify("tetrahedron", bell_signs()[i]));
  for (const auto& v : separable_extreme_points()) out.push_back(classify("octahedron", v.state.t));
  out.push_back(classify("center", Vec3::Zero()));
  for (int a = 0; a <= grid; ++a)
    for (int b = 0; b <= grid; ++b)
      for (int c = 0; c <= grid; ++c) {
        auto coord = [grid](int j) { return -1.0 + 2.0 * j / grid; };
        out.push_back(classify("grid", Vec3(coord(a), coord(b), coord(c))));
      }
  return out;
}

inline std::string fig1_csv(const std::vector<GeometryPoint>& points) {
  std::ostringstream os;
  os.precision(17);
  os << "kind,t1,t2,t3,lambda1,lambda2,lambda3,lambda4,physical,separable,entangled,product,I\n";
  for (const auto& p : points) {
    const Vec4 l = lambda_from_t(p.t);
    os << p.kind << ',' << p.t(0) << ',' << p.t(1) << ',' << p.t(2) << ',' << l(0) << ',' << l(1) << ',' << l(2)
       << ',' << l(3) << ',' << p.physical << ',' << p.separable << ',' << (p.physical && !p.separable) << ','
       << p.product << ',';
    if (p.physical) os << p.mutual_information;
    os << '\n';
  }
  return os.str();
}

}  // namespace hmdiv
