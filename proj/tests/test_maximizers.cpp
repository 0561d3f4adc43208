#include <gtest/gtest.h>

#include <numbers>

#include "hmdiv/hmdiv.hpp"

using namespace hmdiv;

namespace {

constexpr double kLog2 = std::numbers::ln2;

SearchOptions quick(std::uint64_t seed = 0, int restarts = 8) {
  SearchOptions o;
  o.restarts = restarts;
  o.seed = seed;
  o.threads = 1;
  return o;
}

}  // namespace

TEST(SupportBound, PureShapes) {
  EXPECT_EQ(support_bound(build_model(SystemShape::bits(2), hypergraph_k(2, 1))), 3.0);
  EXPECT_EQ(support_bound(build_model(SystemShape::bits(3), hypergraph_k(3, 2))), 7.0);
  EXPECT_NEAR(support_bound(build_model(SystemShape::qubits(2), hypergraph_k(2, 1))), std::sqrt(7.0), 1e-15);
  EXPECT_FALSE(support_bound_is_extension(SystemShape::qubits(2)));
}

TEST(SupportBound, MixedShapeIsFlagged) {
  const SystemShape s({2, 2}, {UnitKind::classical, UnitKind::quantum});
  const HierarchicalModelSpec m = build_model(s, hypergraph_k(2, 1));
  EXPECT_TRUE(support_bound_is_extension(s));
  // D = 1 + 3 = 4: ranks (1,1) cost 2 <= 5, (2,1) costs 5 <= 5, (2,2) costs 8.
  EXPECT_EQ(support_bound(m), 3.0);
}

TEST(ExponentialForm, ModelStatesHaveZeroResidual) {
  Rng rng(51);
  const HierarchicalModelSpec m = build_model(SystemShape::qubits(3), hypergraph_k(3, 2));
  const DensityMatrix sigma = gibbs_state(m, random_gaussian_vector(static_cast<Eigen::Index>(m.dim_model()), rng));
  EXPECT_LT(check_exponential_form(sigma, m), 1e-10);
}

TEST(ExponentialForm, CorrelatedPairPassesGenericStateFails) {
  const SystemShape s = SystemShape::bits(2);
  const HierarchicalModelSpec u1 = build_model(s, hypergraph_k(2, 1));
  const DensityMatrix pair = DensityMatrix::from_probabilities(s, std::vector<double>{0.5, 0, 0, 0.5});
  EXPECT_LT(check_exponential_form(pair, u1), 1e-8);
  Rng rng(52);
  const DensityMatrix generic = random_full_rank(SystemShape::bits(3), rng);
  EXPECT_GT(check_exponential_form(generic, build_model(SystemShape::bits(3), hypergraph_k(3, 2))), 1e-3);
}

TEST(LocalMaxSearch, TwoBitsIndependence) {
  const SearchSummary r = local_max_search(build_model(SystemShape::bits(2), hypergraph_k(2, 1)), quick());
  ASSERT_FALSE(r.maximizers.empty());
  EXPECT_EQ(r.failed, 0);
  EXPECT_NEAR(r.maximizers.front().divergence, kLog2, 1e-6);
  EXPECT_EQ(r.maximizers.front().support_size, 2);
  EXPECT_LE(r.max_objective_drop, 1e-12);
}

TEST(LocalMaxSearch, TwoQubitsIndependence) {
  const SearchSummary r = local_max_search(build_model(SystemShape::qubits(2), hypergraph_k(2, 1)), quick());
  ASSERT_FALSE(r.maximizers.empty());
  const MaximizerReport& best = r.maximizers.front();
  EXPECT_GE(best.divergence, 2.0 * kLog2 - 1e-6);
  EXPECT_EQ(best.rank, 1);
  EXPECT_TRUE(best.bound_satisfied);
  // A maximally entangled pure state: both marginals are maximally mixed.
  for (int i = 0; i < 2; ++i)
    EXPECT_LT((marginal(best.state, UnitSet::of({i})).matrix() - CMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(),
              1e-4);
}

TEST(LocalMaxSearch, ThreeBitsPairwiseBoundsAndExponentialForm) {
  const SearchSummary r = local_max_search(build_model(SystemShape::bits(3), hypergraph_k(3, 2)), quick(3));
  ASSERT_FALSE(r.maximizers.empty());
  for (const auto& m : r.maximizers) {
    EXPECT_LE(m.support_size, 7);
    EXPECT_TRUE(m.bound_satisfied);
    EXPECT_LE(m.exp_form_residual, 1e-5);
  }
  EXPECT_NEAR(r.maximizers.front().divergence, kLog2, 1e-6);
}

TEST(LocalMaxSearch, MixedShapeReportsExtension) {
  const SystemShape s({2, 2}, {UnitKind::classical, UnitKind::quantum});
  const SearchSummary r = local_max_search(build_model(s, hypergraph_k(2, 1)), quick(0, 4));
  EXPECT_TRUE(r.bound_is_extension);
  EXPECT_FALSE(r.notes.empty());
  ASSERT_FALSE(r.maximizers.empty());
  for (const auto& m : r.maximizers) EXPECT_TRUE(m.bound_satisfied);
  EXPECT_NEAR(r.maximizers.front().divergence, kLog2, 1e-6);
}

TEST(LocalMaxSearch, ReproducibleAcrossThreadCounts) {
  const HierarchicalModelSpec m = build_model(SystemShape::bits(3), hypergraph_k(3, 2));
  SearchOptions a = quick(7, 6);
  SearchOptions b = a;
  b.threads = 3;
  const SearchSummary ra = local_max_search(m, a);
  const SearchSummary rb = local_max_search(m, b);
  const SearchSummary rc = local_max_search(m, a);
  ASSERT_EQ(ra.maximizers.size(), rb.maximizers.size());
  for (std::size_t i = 0; i < ra.maximizers.size(); ++i) {
    EXPECT_EQ(ra.maximizers[i].divergence, rb.maximizers[i].divergence);
    EXPECT_EQ(ra.maximizers[i].divergence, rc.maximizers[i].divergence);
    EXPECT_TRUE(ra.maximizers[i].state.matrix() == rb.maximizers[i].state.matrix());
    EXPECT_EQ(ra.maximizers[i].multiplicity, rb.maximizers[i].multiplicity);
  }
}

TEST(LocalMaxSearch, Guards) {
  EXPECT_THROW(local_max_search(build_model(SystemShape::qubits(9), hypergraph_k(9, 1), BuildOptions{false, false})),
               GuardExceeded);
  SearchOptions o;
  o.restarts = 0;
  EXPECT_THROW(local_max_search(build_model(SystemShape::bits(2), hypergraph_k(2, 1)), o), InvalidArgument);
}
