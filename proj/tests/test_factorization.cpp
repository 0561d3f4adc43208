#include <gtest/gtest.h>

#include "hmdiv/hmdiv.hpp"
#include "oracles.hpp"

using namespace hmdiv;

namespace {

const SystemShape kBits3 = SystemShape::bits(3);

std::vector<std::size_t> configs(std::initializer_list<const char*> labels) {
  std::vector<std::size_t> out;
  for (const char* l : labels) out.push_back(parse_config(kBits3, l));
  return out;
}

std::vector<std::size_t> subset_of_mask(unsigned mask, std::size_t d) {
  std::vector<std::size_t> f;
  for (std::size_t x = 0; x < d; ++x)
    if ((mask >> x) & 1u) f.push_back(x);
  return f;
}

}  // namespace

TEST(Configurations, LabelRoundTrip) {
  const SystemShape s = SystemShape({2, 3, 2}, std::vector<UnitKind>(3, UnitKind::classical));
  for (std::size_t x = 0; x < s.dim(); ++x) EXPECT_EQ(parse_config(s, config_label(s, x)), x);
  EXPECT_EQ(parse_config(kBits3, "100"), 4u);
  EXPECT_THROW(parse_config(kBits3, "10"), ParseError);
  EXPECT_THROW(parse_config(kBits3, "1a0"), ParseError);
  EXPECT_THROW(parse_config(kBits3, "120"), ParseError);
}

TEST(InteractionMatrix, PairwiseThreeBits) {
  const InteractionMatrix a = build_interaction_matrix(kBits3, 2);
  EXPECT_EQ(a.entries.rows(), 12);
  EXPECT_EQ(a.entries.cols(), 8);
  for (Eigen::Index x = 0; x < 8; ++x) EXPECT_EQ(a.entries.col(x).sum(), 3);
  EXPECT_EQ(a.row_label(0), "{0,1}:00");
  EXPECT_THROW(build_interaction_matrix(SystemShape::qubits(3), 2), InvalidArgument);
}

TEST(Feasibility, SmallSetsAreFeasible) {
  for (int k = 1; k <= 2; ++k) {
    const FeasibilityReport r = enumerate_feasibility(kBits3, k, k);
    EXPECT_TRUE(r.small_sets_feasible);
  }
  const SystemShape s({2, 3}, std::vector<UnitKind>(2, UnitKind::classical));
  EXPECT_TRUE(enumerate_feasibility(s, 1, 1).small_sets_feasible);
}

TEST(Feasibility, WeightOneStringsAreNotPairwiseFeasible) {
  EXPECT_FALSE(is_k_feasible(configs({"100", "010", "001"}), kBits3, 2));
  EXPECT_TRUE(is_k_feasible(configs({"000", "111"}), kBits3, 2));
  // Even parity has uniform pair margins, so the pairwise fit is uniform on all 8.
  EXPECT_FALSE(is_k_feasible(configs({"000", "011", "101", "110"}), kBits3, 2));
  EXPECT_TRUE(is_k_feasible(configs({"000", "011", "101", "110"}), kBits3, 3));
}

TEST(Feasibility, AgreesWithIpfOracle) {
  for (int k = 1; k <= 2; ++k) {
    const auto sets = oracle::k_subsets(3, k);
    for (unsigned mask = 1; mask < 256; ++mask) {
      const auto f = subset_of_mask(mask, 8);
      EXPECT_EQ(is_k_feasible(f, kBits3, k), oracle::ipf_feasible(f, {2, 2, 2}, sets)) << "k=" << k << " mask=" << mask;
    }
  }
}

TEST(Feasibility, ExhaustiveReportIsConsistent) {
  const FeasibilityReport r = enumerate_feasibility(kBits3, 2, 8);
  std::size_t total = 0;
  for (std::size_t s = 1; s < r.checked_by_size.size(); ++s) total += r.checked_by_size[s];
  EXPECT_EQ(total, 255u);
  std::size_t feasible = 0;
  for (std::size_t v : r.feasible_by_size) feasible += v;
  EXPECT_EQ(feasible + r.non_feasible.size(), 255u);
  const auto y = configs({"001", "010", "100"});
  EXPECT_NE(std::find(r.minimal_non_feasible.begin(), r.minimal_non_feasible.end(), y), r.minimal_non_feasible.end());
}

TEST(Feasibility, GuardAndArguments) {
  EXPECT_THROW(enumerate_feasibility(SystemShape::bits(6), 2, 64, 1000), GuardExceeded);
  EXPECT_THROW(is_k_feasible({}, kBits3, 2), InvalidArgument);
}

TEST(Toric, KernelOfPairwiseModel) {
  const InteractionMatrix a = build_interaction_matrix(kBits3, 2);
  const auto kernel = toric_kernel(a);
  ASSERT_EQ(kernel.size(), 1u);
  IVector want(8);
  want << 1, -1, -1, 1, -1, 1, 1, -1;
  EXPECT_TRUE(kernel[0] == want || kernel[0] == -want);
  EXPECT_EQ((a.entries * kernel[0]).cwiseAbs().sum(), 0);
}

TEST(Toric, KernelDimensionsForOtherModels) {
  // rank of the interaction matrix is the model dimension, so the kernel has d - dim.
  const auto k1 = toric_kernel(build_interaction_matrix(kBits3, 1));
  EXPECT_EQ(k1.size(), 8u - 4u);
  const auto k3 = toric_kernel(build_interaction_matrix(kBits3, 3));
  EXPECT_TRUE(k3.empty());
  const SystemShape s({2, 3}, std::vector<UnitKind>(2, UnitKind::classical));
  const InteractionMatrix a = build_interaction_matrix(s, 1);
  const auto k = toric_kernel(a);
  EXPECT_EQ(k.size(), 2u);
  for (const auto& v : k) EXPECT_EQ((a.entries * v).cwiseAbs().sum(), 0);
}

TEST(Toric, ImageOfMonomialMapIsMember) {
  Rng rng(21);
  const InteractionMatrix a = build_interaction_matrix(kBits3, 2);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int i = 0; i < 20; ++i) {
    RVector t(a.entries.rows());
    for (Eigen::Index r = 0; r < t.size(); ++r) t(r) = u(rng);
    RVector s = monomial_map(a, t);
    s /= s.sum();
    const ToricCheck c = check_toric_membership(s, a);
    EXPECT_TRUE(c.member);
    EXPECT_FALSE(c.zero_support);
  }
}

TEST(Toric, ModelStatesHaveFullSupportAndAreMembers) {
  Rng rng(22);
  const HierarchicalModelSpec m = build_model(kBits3, hypergraph_k(3, 2));
  const InteractionMatrix a = build_interaction_matrix(kBits3, 2);
  for (int i = 0; i < 10; ++i) {
    const DensityMatrix sigma = gibbs_state(m, random_gaussian_vector(6, rng));
    EXPECT_GT(sigma.probabilities().minCoeff(), 0.0);
    EXPECT_TRUE(check_toric_membership(sigma.probabilities(), a).member);
  }
  RVector p = dirichlet(8, rng);
  EXPECT_FALSE(check_toric_membership(p, a).member);
}

TEST(Toric, ClosureContainsNonFeasibleSupport) {
  const InteractionMatrix a = build_interaction_matrix(kBits3, 2);
  const auto y = configs({"100", "010", "001"});
  const ToricCheck c = check_toric_membership(uniform_on(y, 8), a);
  EXPECT_TRUE(c.member);
  EXPECT_TRUE(c.zero_support);
  EXPECT_FALSE(is_k_feasible(y, a));

  const ToricCheck cat = check_toric_membership(uniform_on(configs({"000", "111"}), 8), a);
  EXPECT_TRUE(cat.member);
}
