#include <sstream>

#include "test_util.hpp"

using namespace cleb;
using namespace cleb::testing;

TEST(KSubsets, TwoChooseOneIsStandardBasis) {
  const ActionSet S = make_k_subsets(2, 1);
  ASSERT_EQ(S.size(), 2u);
  EXPECT_TRUE(S.find(bits({1, 0})));
  EXPECT_TRUE(S.find(bits({0, 1})));
}

TEST(KSubsets, FourChooseTwo) {
  const ActionSet S = make_k_subsets(4, 2);
  ASSERT_EQ(S.size(), 6u);
  for (std::size_t v = 0; v < S.size(); ++v) EXPECT_DOUBLE_EQ(S.vertex(v).sum(), 2.0);
}

TEST(KSubsets, FullSubset) {
  const ActionSet S = make_k_subsets(3, 3);
  ASSERT_EQ(S.size(), 1u);
  EXPECT_EQ(S.bits(0), bits({1, 1, 1}));
}

TEST(KSubsets, CapExceeded) { EXPECT_THROW(make_k_subsets(30, 15, 1000), EnumerationLimitError); }

TEST(KSubsets, InvalidK) { EXPECT_THROW(make_k_subsets(3, 4), DomainError); }

TEST(PathDag, ParallelEdges) {
  Dag g;
  g.edges = {{"s", "t"}, {"s", "t"}};
  const ActionSet S = make_path_dag(g);
  ASSERT_EQ(S.size(), 2u);
  EXPECT_TRUE(S.find(bits({1, 0})));
  EXPECT_TRUE(S.find(bits({0, 1})));
}

TEST(PathDag, Diamond) {
  Dag g;
  g.edges = {{"s", "a"}, {"s", "b"}, {"a", "t"}, {"b", "t"}};
  const ActionSet S = make_path_dag(g);
  ASSERT_EQ(S.size(), 2u);
  EXPECT_TRUE(S.find(bits({1, 0, 1, 0})));
  EXPECT_TRUE(S.find(bits({0, 1, 0, 1})));
}

TEST(PathDag, Chain) {
  Dag g;
  g.edges = {{"s", "a"}, {"a", "t"}};
  const ActionSet S = make_path_dag(g);
  ASSERT_EQ(S.size(), 1u);
  EXPECT_EQ(S.bits(0), bits({1, 1}));
}

TEST(PathDag, NoPathIsEmpty) {
  Dag g;
  g.edges = {{"s", "a"}, {"b", "t"}};
  EXPECT_THROW(make_path_dag(g), EmptySetError);
}

TEST(PathDag, ReadsGraphText) {
  std::istringstream in("source s\nsink t\ns a\ns b\na t\nb t\n");
  EXPECT_EQ(make_path_dag(read_dag(in)).size(), 2u);
}

TEST(Exp2LowerBoundSet, DimensionFour) {
  const ActionSet S = make_exp2_lowerbound_set(4);
  ASSERT_EQ(S.size(), 4u);
  for (auto b : {bits({1, 0, 1, 0}), bits({0, 1, 1, 0}), bits({1, 0, 0, 1}), bits({0, 1, 0, 1})})
    EXPECT_TRUE(S.find(b));
}

TEST(Exp2LowerBoundSet, DimensionEightCount) { EXPECT_EQ(make_exp2_lowerbound_set(8).size(), 12u); }

TEST(Exp2LowerBoundSet, RejectsNonMultipleOfFour) { EXPECT_THROW(make_exp2_lowerbound_set(6), DomainError); }

TEST(PairGames, Counts) {
  const ActionSet S2 = make_pair_games_set(2);
  EXPECT_EQ(S2.size(), 2u);
  EXPECT_EQ(make_pair_games_set(4).size(), 4u);
  const ActionSet S6 = make_pair_games_set(6);
  ASSERT_EQ(S6.size(), 8u);
  for (std::size_t v = 0; v < S6.size(); ++v) EXPECT_DOUBLE_EQ(S6.vertex(v).sum(), 3.0);
}

TEST(PairGames, RejectsOddDimension) { EXPECT_THROW(make_pair_games_set(5), DomainError); }

TEST(AlmostSymmetric, KSubsets) {
  const auto cert = check_almost_symmetric(make_k_subsets(4, 2), 2);
  ASSERT_TRUE(cert.witness);
  EXPECT_GE(cert.witness->minCoeff(), 2.0 / 8.0 - 1e-9);
}

TEST(AlmostSymmetric, Simplex) {
  const auto cert = check_almost_symmetric(make_simplex(2), 1);
  ASSERT_TRUE(cert.witness);
  EXPECT_GE(cert.witness->minCoeff(), 0.25 - 1e-9);
}

TEST(AlmostSymmetric, NormAboveOrderHasNoWitness) {
  EXPECT_FALSE(check_almost_symmetric(make_k_subsets(4, 2), 1).witness);
}

TEST(AlmostSymmetric, UncoveredCoordinateRejectedAtConstruction) {
  EXPECT_THROW(ActionSet(3, {bits({1, 1, 0}), bits({1, 0, 0})}), DomainError);
}

TEST(AlmostSymmetric, NoWitnessWhenTheLevelIsUnreachable) {
  // On the simplex every hull point sums to 1, so all coordinates cannot reach 1/2 when d = 3.
  EXPECT_FALSE(check_almost_symmetric(make_simplex(3), 3).witness);
}

TEST(ActionSetInvariants, ExactCounts) {
  for (std::size_t d = 1; d <= 12; ++d)
    for (std::size_t k = 1; k <= d; ++k)
      EXPECT_EQ(static_cast<double>(make_k_subsets(d, k).size()), detail::binomial(d, k));
  for (std::size_t d = 2; d <= 16; d += 2) EXPECT_EQ(make_pair_games_set(d).size(), std::size_t{1} << (d / 2));
  for (std::size_t d = 4; d <= 16; d += 4)
    EXPECT_EQ(static_cast<double>(make_exp2_lowerbound_set(d).size()), 2.0 * detail::binomial(d / 2, d / 4));
}

TEST(ActionSetInvariants, KSubsetsAreAlmostSymmetric) {
  for (std::size_t d = 2; d <= 8; ++d)
    for (std::size_t k = 1; k <= d; ++k)
      EXPECT_TRUE(check_almost_symmetric(make_k_subsets(d, k), k).witness) << "d=" << d << " k=" << k;
}

TEST(ActionSetInvariants, RejectsDuplicatesAndBadEntries) {
  EXPECT_THROW(ActionSet(2, {bits({1, 0}), bits({1, 0}), bits({0, 1})}), DomainError);
  EXPECT_THROW(ActionSet(2, {bits({2, 0}), bits({0, 1})}), DomainError);
  EXPECT_THROW(ActionSet(2, {}), EmptySetError);
}

TEST(ActionSetInvariants, LexicographicOrder) {
  const ActionSet S = make_k_subsets(3, 1);
  EXPECT_EQ(S.bits(0), bits({0, 0, 1}));
  EXPECT_EQ(S.bits(2), bits({1, 0, 0}));
}

TEST(SetSpec, ParsesGenerators) {
  EXPECT_EQ(parse_action_set("ksubsets:d=8,k=2").size(), 28u);
  EXPECT_EQ(parse_action_set("exp2lb:d=8").size(), 12u);
  EXPECT_EQ(parse_action_set("pairs:d=8").size(), 16u);
  EXPECT_EQ(parse_action_set("simplex:d=5").size(), 5u);
  EXPECT_THROW(parse_action_set("cube:d=3"), DomainError);
}

TEST(SetSpec, ParsesFiles) {
  EXPECT_EQ(parse_action_set("paths:" CLEB_DATA_DIR "/diamond.dag").size(), 2u);
  EXPECT_EQ(parse_action_set("explicit:" CLEB_DATA_DIR "/triangle.set").size(), 3u);
}
