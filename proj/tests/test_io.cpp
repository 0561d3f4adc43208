#include <gtest/gtest.h>

#include <filesystem>
#include <numbers>

#include "hmdiv/hmdiv.hpp"

using namespace hmdiv;

namespace {

const std::string kData = HMDIV_SAMPLE_DATA;

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Io, ShapeFromJson) {
  const SystemShape a = shape_from_json(Json::parse(R"({"sizes": [2, 3], "kinds": ["classical", "quantum"]})"));
  EXPECT_EQ(a.sizes(), (std::vector<int>{2, 3}));
  EXPECT_EQ(a.kind(0), UnitKind::classical);
  const SystemShape b = shape_from_json(Json::parse(R"({"sizes": [2, 2], "kinds": "c"})"));
  EXPECT_TRUE(b.all_classical());
  EXPECT_TRUE(shape_from_json(Json::parse(R"({"sizes": [2]})")).all_quantum());
  EXPECT_EQ(shape_from_json(shape_to_json(a)).sizes(), a.sizes());
}

TEST(Io, ShapeErrorsNameTheLocation) {
  EXPECT_NE(message_of([] { shape_from_json(Json::parse(R"({"sizes": [2, "x"]})")); }).find("sizes[1]"),
            std::string::npos);
  EXPECT_THROW(shape_from_json(Json::parse(R"({"sizes": []})")), ParseError);
  EXPECT_THROW(shape_from_json(Json::parse(R"({"sizes": [2], "kinds": ["bogus"]})")), ParseError);
  EXPECT_THROW(shape_from_json(Json::parse(R"({"sizes": [0]})")), ParseError);
  EXPECT_THROW(shape_from_json(Json::parse(R"({"kinds": "q"})")), ParseError);
}

TEST(Io, ShapeList) {
  EXPECT_EQ(parse_shape_list("2,3,2", UnitKind::classical).dim(), 12u);
  EXPECT_THROW(parse_shape_list("2,x", UnitKind::quantum), ParseError);
  EXPECT_THROW(parse_shape_list("", UnitKind::quantum), ParseError);
}

TEST(Io, StateRoundTrip) {
  Rng rng(71);
  for (const SystemShape& s :
       {SystemShape::qubits(2), SystemShape::bits(3), SystemShape({2, 2}, {UnitKind::classical, UnitKind::quantum})}) {
    const DensityMatrix rho = random_full_rank(s, rng);
    const DensityMatrix back = state_from_json(Json::parse(state_to_json(rho).dump()));
    EXPECT_TRUE(back.shape() == s);
    EXPECT_LT((back.matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Io, StateValidation) {
  EXPECT_THROW(state_from_json(Json::parse(R"({"shape": {"sizes": [2]}, "probabilities": [0.5, 0.5]})")), InvalidState);
  EXPECT_THROW(state_from_json(Json::parse(R"({"shape": {"sizes": [2]}, "matrix": [[1, 0], [0]]})")), ParseError);
  EXPECT_THROW(state_from_json(Json::parse(R"({"shape": {"sizes": [2]}, "matrix": [[1, 0], [0, 1]]})")), InvalidState);
  EXPECT_THROW(state_from_json(Json::parse(R"({"shape": {"sizes": [2]}})")), ParseError);
  const DensityMatrix plain =
      state_from_json(Json::parse(R"({"shape": {"sizes": [2]}, "matrix": [[0.5, [0, 0.5]], [[0, -0.5], 0.5]]})"));
  EXPECT_NEAR(plain.matrix()(0, 1).imag(), 0.5, 0);
}

TEST(Io, HypergraphForms) {
  const Hypergraph g = hypergraph_from_json(Json::parse(R"({"N": 3, "generators": [[0, 1], [1, 2]]})"));
  EXPECT_EQ(g.size(), 6u);
  const Hypergraph s = hypergraph_from_json(hypergraph_to_json(g));
  EXPECT_EQ(s.sets(), g.sets());
  EXPECT_THROW(hypergraph_from_json(Json::parse(R"({"N": 2, "generators": [[0]], "sets": [[]]})")), ParseError);
  EXPECT_THROW(hypergraph_from_json(Json::parse(R"({"N": 2, "sets": [[], [0], [0, 1]]})")), InvalidHypergraph);
  EXPECT_THROW(hypergraph_from_json(Json::parse(R"({"N": 2, "generators": [[0, 2]]})")), InvalidSubsystem);
}

TEST(Io, SampleFiles) {
  const DensityMatrix ghz = read_state(kData + "/ghz.json");
  EXPECT_NEAR(multi_information(ghz), 3.0 * std::numbers::ln2, 1e-12);
  EXPECT_EQ(read_hypergraph(kData + "/pairwise3.json").size(), 7u);
  EXPECT_TRUE(read_state(kData + "/parity_bits.json").shape().all_classical());
  EXPECT_THROW(read_state(kData + "/missing.json"), ParseError);
  const auto bad = std::filesystem::temp_directory_path() / "hmdiv_bad.json";
  write_text(bad.string(), "{ not json");
  EXPECT_THROW(read_state(bad.string()), ParseError);
  std::filesystem::remove(bad);
}
