#include <gtest/gtest.h>

#include <numbers>

#include "hmdiv/hmdiv.hpp"
#include "oracles.hpp"

using namespace hmdiv;

namespace {

constexpr double kLog2 = std::numbers::ln2;

Vec3 random_physical_t(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  while (true) {
    const Vec3 t(u(rng), u(rng), u(rng));
    if (lambda_from_t(t).minCoeff() >= 0.0) return t;
  }
}

}  // namespace

TEST(BellDiagonal, Examples) {
  const BellDiagonal mixed = bell_from_t(Vec3::Zero());
  EXPECT_LT((mixed.lambda - Vec4::Constant(0.25)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((bell_matrix(mixed.t) - CMatrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff(), 1e-15);

  const BellDiagonal psi1 = bell_from_lambda(Vec4(1, 0, 0, 0));
  EXPECT_LT((psi1.t - Vec3(1, -1, 1)).cwiseAbs().maxCoeff(), 1e-15);

  const BellDiagonal half = bell_from_lambda(Vec4(0.5, 0.5, 0, 0));
  EXPECT_LT((half.t - Vec3(0, 0, 1)).cwiseAbs().maxCoeff(), 1e-15);
  CMatrix cat = CMatrix::Zero(4, 4);
  cat(0, 0) = cat(3, 3) = 0.5;
  EXPECT_LT((bell_matrix(half.t) - cat).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BellDiagonal, RejectsNonPhysicalInput) {
  EXPECT_THROW(bell_from_t(Vec3(1, 1, 1)), InvalidState);
  EXPECT_THROW(bell_from_lambda(Vec4(0.5, 0.5, 0.5, 0)), InvalidState);
  EXPECT_THROW(bell_from_lambda(Vec4(1.2, -0.2, 0, 0)), InvalidState);
}

TEST(BellDiagonal, SignsMatchEigendecomposition) {
  // Each Bell vector is an eigenvector of sigma_j (x) sigma_j with eigenvalue s_ij.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) {
      const CVector v = bell_basis()[i];
      const CMatrix ss = oracle::kron(oracle::pauli(j + 1), oracle::pauli(j + 1));
      EXPECT_LT((ss * v - bell_signs()[i](j) * v).norm(), 1e-14);
    }
  Rng rng(61);
  for (int n = 0; n < 20; ++n) {
    const BellDiagonal b = bell_from_t(random_physical_t(rng));
    const CMatrix m = bell_matrix(b.t);
    for (int i = 0; i < 4; ++i) EXPECT_LT((m * bell_basis()[i] - b.lambda(i) * bell_basis()[i]).norm(), 1e-14);
  }
}

TEST(BellDiagonal, RoundTrip) {
  Rng rng(62);
  for (int n = 0; n < 1000; ++n) {
    const Vec3 t = random_physical_t(rng);
    const BellDiagonal b = bell_from_t(t);
    EXPECT_LT((t_from_lambda(b.lambda) - t).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((bell_from_lambda(b.lambda).lambda - b.lambda).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Separability, Examples) {
  EXPECT_FALSE(is_separable(bell_from_lambda(Vec4(1, 0, 0, 0))));
  EXPECT_TRUE(is_separable(bell_from_lambda(Vec4(0.5, 0.5, 0, 0))));
  const SeparabilityCheck c = separability(bell_from_t(Vec3(1.0 / 3, 1.0 / 3, 1.0 / 3)));
  EXPECT_TRUE(c.separable);
  EXPECT_TRUE(c.agree);
}

TEST(Separability, CriteriaAgreeOnRandomStates) {
  Rng rng(63);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int physical = 0;
  for (int n = 0; n < 100000; ++n) {
    const Vec3 t(u(rng), u(rng), u(rng));
    if (lambda_from_t(t).minCoeff() < 0.0) continue;
    ++physical;
    ASSERT_TRUE(separability(bell_from_t(t)).agree) << t.transpose();
  }
  EXPECT_GT(physical, 30000);
}

TEST(MutualInformation, ClosedFormMatchesGeneric) {
  EXPECT_NEAR(mutual_information_bd(bell_from_t(Vec3::Zero())), 0.0, 1e-15);
  EXPECT_NEAR(mutual_information_bd(bell_from_lambda(Vec4(1, 0, 0, 0))), 2 * kLog2, 1e-15);
  EXPECT_NEAR(mutual_information_bd(bell_from_lambda(Vec4(0.5, 0.5, 0, 0))), kLog2, 1e-15);
  Rng rng(64);
  for (int n = 0; n < 50; ++n) {
    const BellDiagonal b = bell_from_t(random_physical_t(rng));
    EXPECT_NEAR(mutual_information_bd(b), multi_information(bell_state(b)), 1e-10);
    EXPECT_NEAR(mutual_information_bd(b), oracle::multi_information(bell_matrix(b.t), {2, 2}), 1e-10);
  }
}

TEST(MutualInformation, MinimalDivergenceFromProductStates) {
  Rng rng(65);
  std::vector<BellDiagonal> states;
  for (const auto& v : separable_extreme_points()) states.push_back(v.state);
  for (int n = 0; n < 10; ++n) states.push_back(bell_from_t(random_physical_t(rng)));
  for (const BellDiagonal& b : states) {
    const double best = oracle::min_divergence_from_products(bell_matrix(b.t), rng);
    EXPECT_NEAR(best, mutual_information_bd(b), 1e-4) << b.t.transpose();
  }
}

TEST(ExtremePoints, SixClassicallyCorrelatedVertices) {
  const auto v = separable_extreme_points();
  ASSERT_EQ(v.size(), 6u);
  for (const auto& x : v) {
    EXPECT_EQ((x.state.lambda.array() == 0.5).count(), 2);
    EXPECT_NEAR(x.state.t.cwiseAbs().sum(), 1.0, 1e-15);
    EXPECT_NEAR(x.state.t.cwiseAbs().maxCoeff(), 1.0, 1e-15);
    EXPECT_NEAR(mutual_information_bd(x.state), kLog2, 1e-12);
    EXPECT_LT((bell_matrix(x.state.t) - x.product.matrix()).cwiseAbs().maxCoeff(), 1e-12) << x.product.label;
    EXPECT_TRUE(is_classically_correlated_bd(x.state).classical);
  }
}

TEST(ClassicalCorrelation, Examples) {
  const ClassicalCorrelation zz = is_classically_correlated_bd(bell_from_t(Vec3(0, 0, 1)));
  EXPECT_TRUE(zz.classical);
  EXPECT_LT((zz.witness.adjoint() * zz.witness - CMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(zz.off_diagonal, 1e-14);
  EXPECT_FALSE(is_classically_correlated_bd(bell_from_t(Vec3(1, -1, 1))).classical);
  EXPECT_FALSE(is_classically_correlated_bd(bell_from_t(Vec3(0.3, 0.3, 0))).classical);
  const ClassicalCorrelation xx = is_classically_correlated_bd(bell_from_t(Vec3(-0.4, 0, 0)));
  EXPECT_TRUE(xx.classical);
  EXPECT_EQ(xx.axis, 0);
  EXPECT_LT(xx.off_diagonal, 1e-14);
}

TEST(SeparableBound, BoundHoldsAndVerticesAttainIt) {
  const SeparableBoundReport r = verify_theorem1(10000, 1);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.violations, 0);
  EXPECT_LT(r.max_sampled_I, kLog2);
  ASSERT_EQ(r.vertices.size(), 6u);
  for (const auto& v : r.vertices) {
    EXPECT_NEAR(v.mutual_information, kLog2, 1e-9);
    EXPECT_LT(v.local_unitary_error, 1e-12);
    EXPECT_LT(v.unitarity_error, 1e-12);
  }
  EXPECT_THROW(verify_theorem1(0, 1), InvalidArgument);
}

TEST(Fig1, GeometryCounts) {
  const auto pts = fig1_geometry(10);
  int tetra = 0, octa = 0, center = 0;
  for (const auto& p : pts) {
    tetra += p.kind == "tetrahedron";
    octa += p.kind == "octahedron";
    if (p.kind == "center") {
      ++center;
      EXPECT_TRUE(p.product);
      EXPECT_EQ(p.t, Vec3::Zero());
    }
    if (p.kind == "tetrahedron") EXPECT_FALSE(p.separable);
    if (p.kind == "octahedron") EXPECT_NEAR(p.mutual_information, kLog2, 1e-12);
  }
  EXPECT_EQ(tetra, 4);
  EXPECT_EQ(octa, 6);
  EXPECT_EQ(center, 1);
  EXPECT_EQ(pts.size(), 11u + 11u * 11u * 11u);

  const auto fine = fig1_geometry(20);
  bool found = false;
  for (const auto& p : fine)
    if (p.kind == "grid" && (p.t - Vec3(0.9, 0, 0)).norm() < 1e-12) {
      found = true;
      EXPECT_TRUE(p.physical);
      EXPECT_TRUE(p.separable);
      EXPECT_NEAR(p.mutual_information, mutual_information_bd(bell_from_t(Vec3(0.9, 0, 0))), 1e-15);
    }
  EXPECT_TRUE(found);
  const std::string csv = fig1_csv(pts);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "kind,t1,t2,t3,lambda1,lambda2,lambda3,lambda4,physical,separable,entangled,product,I");
}
