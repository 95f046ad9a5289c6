#include <cmath>
#include <sstream>

#include "test_util.hpp"

using namespace cleb;
using namespace cleb::testing;

TEST(Validate, ZeroLossIsValid) {
  const ActionSet S = make_k_subsets(4, 2);
  EXPECT_TRUE(validate(Constraint::linf, S, Vector::Zero(4)).ok);
  EXPECT_TRUE(validate(Constraint::l2, S, Vector::Zero(4)).ok);
}

TEST(Validate, OnesOnKSubsets) {
  const ActionSet S = make_k_subsets(4, 2);
  EXPECT_TRUE(validate(Constraint::linf, S, Vector::Ones(4)).ok);
  const ValidationReport r = validate(Constraint::l2, S, Vector::Ones(4));
  EXPECT_FALSE(r.ok);
  EXPECT_FALSE(r.violation.empty());
}

TEST(Validate, CoordinateAboveOne) {
  EXPECT_FALSE(validate(Constraint::linf, make_simplex(3), vec({0.0, 1.5, 0.0})).ok);
}

TEST(Thm16Alternating, DimensionEight) {
  Vector odd = Vector::Zero(8), even = Vector::Zero(8);
  odd[4] = odd[5] = 1.0;
  even[6] = even[7] = 1.0;
  expect_near(thm16_alternating(8, 1), odd, 0.0);
  expect_near(thm16_alternating(8, 2), even, 0.0);
}

TEST(Thm16Alternating, DimensionFourOddRound) { expect_near(thm16_alternating(4, 3), vec({0, 0, 1, 0}), 0.0); }

TEST(Thm16Epsilon, DimensionEight) {
  expect_near(thm16_epsilon(8, 0.25), vec({0.75, 0.75, 1, 1, 0, 0, 0, 0}), 1e-15);
}

TEST(Thm16Epsilon, ZeroEpsilon) { expect_near(thm16_epsilon(4, 0.0), vec({1, 1, 0, 0}), 0.0); }

TEST(Thm16Epsilon, DefaultEpsilon) { EXPECT_NEAR(thm16_default_eps(0.1, 100), std::log(2.0) / 10.0, 1e-15); }

TEST(AlphaAdversary, Means) { expect_near(alpha_means({1, 2}, 0.1), vec({0.5, 0.6, 0.6, 0.5}), 1e-15); }

TEST(AlphaAdversary, ZeroEpsilonIsFair) {
  for (const auto& a : all_alphas(3)) expect_near(alpha_means(a, 0.0), Vector::Constant(6, 0.5), 0.0);
  EXPECT_EQ(all_alphas(3).size(), 8u);
}

TEST(AlphaAdversary, ParseBits) {
  EXPECT_EQ(parse_alpha("01"), (std::vector<int>{1, 2}));
  EXPECT_THROW(parse_alpha("012"), DomainError);
}

TEST(AlphaAdversary, EmpiricalMeansConverge) {
  const Adversary a = Adversary::alpha({1, 2, 1}, 0.2);
  RandomStream rng(1, 1);
  Vector total = Vector::Zero(6);
  const int draws = 20000;
  for (int t = 1; t <= draws; ++t) total += a.draw(static_cast<std::size_t>(t), rng);
  expect_near(total / draws, a.mean(1), 0.02);
}

TEST(Thm18Adversary, SingleNonzeroCoordinate) {
  const Adversary a = Adversary::thm18({1, 2}, 0.3, false);
  RandomStream rng(2, 1);
  for (int t = 1; t <= 1000; ++t) {
    const Vector l = a.draw(static_cast<std::size_t>(t), rng);
    EXPECT_LE((l.array() != 0.0).count(), 1);
    EXPECT_TRUE(validate(Constraint::l2, make_pair_games_set(4), l).ok);
  }
}

TEST(Thm18Adversary, MaskedMean) {
  const Adversary a = Adversary::thm18({1, 2}, 0.1, true);
  EXPECT_NEAR(a.mean(1)[2], 0.25 * 0.6, 1e-15);
  RandomStream rng(3, 1);
  int hits = 0;
  const int draws = 40000;
  for (int t = 1; t <= draws; ++t) hits += a.draw(static_cast<std::size_t>(t), rng)[2] != 0.0;
  EXPECT_NEAR(static_cast<double>(hits) / draws, 0.15, 0.01);
}

TEST(Thm18Adversary, ZeroEpsilonIsFair) {
  const Adversary a = Adversary::thm18({2, 2}, 0.0, false);
  expect_near(a.mean(1), Vector::Constant(4, 0.125), 1e-15);
}

TEST(Adversaries, DrawsAreValidUnderTheirConstraint) {
  const ActionSet S = make_pair_games_set(6);
  std::vector<Adversary> advs{Adversary::alpha({1, 2, 2}, 0.3), Adversary::thm18({2, 1, 1}, 0.3, true),
                              Adversary::bernoulli(Vector::Constant(6, 0.5), Constraint::l2, 1.0 / 6.0)};
  RandomStream rng(9, 1);
  for (const Adversary& a : advs)
    for (int t = 1; t <= 10000; ++t)
      EXPECT_TRUE(validate(a.constraint(), S, a.draw(static_cast<std::size_t>(t), rng)).ok) << a.describe();
}

TEST(Adversaries, DeterministicKindsIgnoreRandomness) {
  const Adversary a = Adversary::thm16a(8);
  EXPECT_TRUE(a.deterministic());
  RandomStream rng(1, 1);
  expect_near(a.draw(2, rng), thm16_alternating(8, 2), 0.0);
  EXPECT_EQ(rng.counter(), 0u);
}

TEST(Adversaries, FixedSequenceFromFile) {
  std::istringstream in("# two rounds\n0 1 0\n1 0 0.5\n");
  const Adversary a = Adversary::fixed(read_loss_rows(in));
  expect_near(a.mean(2), vec({1, 0, 0.5}), 0.0);
  EXPECT_THROW(a.mean(3), DomainError);
}

TEST(AdversarySpec, Parses) {
  AdversaryContext ctx{8, 64, 0.1, Constraint::linf};
  EXPECT_EQ(parse_adversary("thm16a", ctx).kind(), Adversary::Kind::thm16a);
  EXPECT_NEAR(parse_adversary("thm16e:eps=auto", ctx).eps(), thm16_default_eps(0.1, 64), 1e-15);
  EXPECT_NEAR(parse_adversary("thm16e:eps=0.25,scale=auto", ctx).mean(1)[0], 0.75 / 8.0, 1e-15);
  const Adversary b = parse_adversary("bernoulli:means=0.3", ctx);
  expect_near(b.mean(1), Vector::Constant(8, 0.3), 0.0);
  const Adversary alt = parse_adversary("alternating:first=10000000,second=01000000", ctx);
  EXPECT_DOUBLE_EQ(alt.mean(3)[0], 1.0);
  EXPECT_DOUBLE_EQ(alt.mean(4)[1], 1.0);
  EXPECT_THROW(parse_adversary("alpha:eps=0.1,alpha=01", ctx), DomainError);
  EXPECT_THROW(parse_adversary("storm", ctx), DomainError);
}
