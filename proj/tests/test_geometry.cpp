#include <cmath>

#include "test_util.hpp"

using namespace cleb;
using namespace cleb::testing;

TEST(Projection, SimplexNegentropyIsNormalization) {
  const ActionSet S = make_simplex(2);
  const ProjectionResult r = bregman_project(Potential::negentropy(1.0), S, vec({0.5, 1.5}));
  expect_near(r.w, vec({0.25, 0.75}), 1e-12);
}

TEST(Projection, SimplexGeneralSolverAgrees) {
  ProjectionOptions general;
  general.allow_fast_path = false;
  const ProjectionResult r = bregman_project(Potential::negentropy(1.0), make_simplex(2), vec({0.5, 1.5}), general);
  expect_near(r.w, vec({0.25, 0.75}), 1e-9);
}

TEST(Projection, KSubsetsSegment) {
  const ProjectionResult r = bregman_project(Potential::negentropy(1.0), make_k_subsets(2, 1), vec({0.2, 0.4}));
  expect_near(r.w, vec({1.0 / 3.0, 2.0 / 3.0}), 1e-10);
}

TEST(Projection, KSubsetsSegmentMatchesGridSearch) {
  const Potential P = Potential::negentropy(1.0);
  const Vector w_prime = vec({0.2, 0.4});
  double best = 0.0, best_value = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 100000; ++i) {
    const double x = i / 100000.0;
    const double value = P.bregman_div(vec({x, 1.0 - x}), w_prime);
    if (value < best_value) {
      best_value = value;
      best = x;
    }
  }
  EXPECT_NEAR(bregman_project(P, make_k_subsets(2, 1), w_prime).w[0], best, 1e-5);
}

TEST(Projection, PointInsideHullIsFixed) {
  const ActionSet S = make_k_subsets(4, 2);
  const Vector w = vec({0.5, 0.5, 0.6, 0.4});
  for (const Potential& P : {Potential::negentropy(0.4), Potential::poly(0.3, 2.0)})
    expect_near(bregman_project(P, S, w).w, w, 1e-8);
}

TEST(Projection, KSubsetsUniformAnchor) {
  const ActionSet S = make_k_subsets(4, 2);
  for (const Potential& P : {Potential::negentropy(1.0), Potential::poly(0.5, 2.0)})
    expect_near(bregman_project(P, S, Vector::Ones(4)).w, Vector::Constant(4, 0.5), 1e-9);
}

TEST(Projection, FirstOrderOptimality) {
  RandomStream rng(21, 0);
  const ActionSet S = make_pair_games_set(6);
  const Potential P = Potential::negentropy(0.8);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector w_prime = properties::random_interior(6, rng, 0.05, 2.0);
    const Vector w_hat = bregman_project(P, S, w_prime).w;
    const Vector g = P.grad(w_hat) - P.grad(w_prime);
    for (std::size_t v = 0; v < S.size(); ++v) EXPECT_GE(g.dot(S.vertex(v) - w_hat), -1e-7);
  }
}

TEST(Projection, DistributionReproducesPoint) {
  const ActionSet S = make_k_subsets(5, 2);
  const ProjectionResult r = bregman_project(Potential::poly(0.7, 2.0), S, vec({0.1, 0.9, 0.3, 1.2, 0.05}));
  EXPECT_NEAR(r.distribution.total(), 1.0, 1e-12);
  expect_near(r.distribution.mean(S), r.w, 1e-10);
  EXPECT_LE(r.distribution.support(), S.dim() + 1);
}

TEST(Projection, DualPointOutsideRangeIsRejected) {
  EXPECT_THROW(bregman_project_dual(Potential::poly(1.0, 2.0), make_simplex(2), vec({-1.0, 0.5})), DomainError);
}

TEST(Decomposition, VertexIsPointMass) {
  const ActionSet S = make_k_subsets(4, 2);
  const VertexDistribution p = caratheodory_decompose(S, S.vertex(3));
  EXPECT_NEAR(p.dense(S.size())[3], 1.0, 1e-10);
}

TEST(Decomposition, SegmentIsUnique) {
  const ActionSet S = make_simplex(2);
  const Vector p = caratheodory_decompose(S, vec({0.3, 0.7})).dense(S.size());
  EXPECT_NEAR(p[static_cast<Eigen::Index>(*S.find(bits({1, 0})))], 0.3, 1e-10);
  EXPECT_NEAR(p[static_cast<Eigen::Index>(*S.find(bits({0, 1})))], 0.7, 1e-10);
}

TEST(Decomposition, PairGamesCenter) {
  const ActionSet S = make_pair_games_set(4);
  const Vector w = Vector::Constant(4, 0.5);
  const VertexDistribution p = caratheodory_decompose(S, w);
  EXPECT_NEAR(p.total(), 1.0, 1e-12);
  for (double x : p.prob) EXPECT_GE(x, 0.0);
  expect_near(p.mean(S), w, 1e-8);
}

TEST(Decomposition, OutsideHullCarriesCertificate) {
  const ActionSet S = make_simplex(3);
  try {
    caratheodory_decompose(S, vec({0.5, 0.5, 0.5}));
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    // The separating direction must point out of the hull: positive against w, equal on all vertices.
    const Vector& c = e.certificate();
    EXPECT_GT(c.dot(vec({0.5, 0.5, 0.5})), c.dot(S.vertex(0)));
  }
}

TEST(Decomposition, ReduceKeepsMean) {
  const ActionSet S = make_k_subsets(4, 2);
  VertexDistribution p;
  for (std::size_t v = 0; v < S.size(); ++v) {
    p.index.push_back(v);
    p.prob.push_back(1.0 / static_cast<double>(S.size()));
  }
  const VertexDistribution reduced = caratheodory_reduce(S, p);
  EXPECT_LE(reduced.support(), S.dim() + 1);
  expect_near(reduced.mean(S), p.mean(S), 1e-12);
  EXPECT_NEAR(reduced.total(), 1.0, 1e-12);
}

TEST(Pinv, Diagonal) {
  Matrix M = Matrix::Zero(2, 2);
  M(0, 0) = 0.5;
  const Matrix Mp = pinv_psd(M);
  EXPECT_NEAR(Mp(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(Mp.cwiseAbs().sum(), 2.0, 1e-14);
}

TEST(Pinv, Identity) { EXPECT_TRUE(pinv_psd(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3), 1e-14)); }

TEST(Pinv, RejectsAsymmetricAndIndefinite) {
  Matrix A(2, 2);
  A << 1, 1, 0, 1;
  EXPECT_THROW(pinv_psd(A), DomainError);
  Matrix B(2, 2);
  B << 1, 0, 0, -1;
  EXPECT_THROW(pinv_psd(B), DomainError);
}

TEST(Spanner, StandardBasis) {
  const SpannerBasis B = barycentric_spanner(make_simplex(4));
  EXPECT_EQ(B.m, 4u);
  const Vector l = vec({0.1, 0.2, 0.3, 0.4});
  const Vector t1 = spanner_transform(B, l, SpannerMap::t1);
  // Columns are a permutation of the identity, so T1 and T2 agree up to that permutation.
  EXPECT_NEAR(t1.sum(), l.sum(), 1e-14);
  EXPECT_NEAR(t1.dot(spanner_transform(B, l, SpannerMap::t2)), l.squaredNorm(), 1e-14);
}

TEST(Spanner, TriangleHasUnitDeterminant) {
  const ActionSet S(2, {bits({1, 0}), bits({0, 1}), bits({1, 1})});
  const SpannerBasis B = barycentric_spanner(S);
  EXPECT_EQ(B.m, 2u);
  EXPECT_NEAR(std::abs(B.basis.determinant()), 1.0, 1e-12);
}

TEST(Spanner, OneDimensionalSpan) {
  const ActionSet S(2, {bits({1, 1})});
  const SpannerBasis B = barycentric_spanner(S);
  EXPECT_EQ(B.m, 1u);
  expect_near(B.t2(vec({1, 1})), vec({1}), 1e-14);
}

TEST(Spanner, ExplicitBasisCoordinates) {
  const SpannerBasis B = spanner_from_vectors({vec({1, 0}), vec({1, 1})});
  expect_near(spanner_transform(B, vec({0, 1}), SpannerMap::t2), vec({-1, 1}), 1e-14);
}

TEST(Spanner, OutsideSpanIsResidualError) {
  const SpannerBasis B = spanner_from_vectors({vec({1, 1})});
  EXPECT_THROW(B.t2(vec({1, 0})), ResidualError);
}

TEST(Spanner, InnerProductIdentityAndBound) {
  RandomStream rng(8, 0);
  for (const ActionSet& S : properties::sample_sets()) {
    const SpannerBasis B = barycentric_spanner(S, 1.01);
    const Vector l = properties::random_interior(S.dim(), rng, -1.0, 1.0);
    for (std::size_t v = 0; v < S.size(); ++v) {
      const Vector z = B.t2(S.vertex(v));
      EXPECT_NEAR(l.dot(S.vertex(v)), B.t1(l).dot(z), 1e-10);
      EXPECT_LE(z.lpNorm<Eigen::Infinity>(), B.C + 1e-9);
    }
  }
}
