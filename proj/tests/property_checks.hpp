#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "cleb/cleb.hpp"

namespace cleb::properties {

/// Worst observed value of a checked quantity; `ok` compares it to the tolerance.
struct PropertyResult {
  std::string name;
  double worst = 0.0;
  double tolerance = 0.0;
  std::size_t instances = 0;
  bool ok = true;
};

inline std::vector<ActionSet> sample_sets() {
  std::vector<ActionSet> out;
  out.push_back(make_simplex(4));
  out.push_back(make_k_subsets(5, 2));
  out.push_back(make_pair_games_set(6));
  out.push_back(make_exp2_lowerbound_set(4));
  out.push_back(ActionSet(3, {BinaryVector{1, 0, 0}, BinaryVector{0, 1, 1}, BinaryVector{1, 1, 0}, BinaryVector{0, 0, 1}}));
  return out;
}

inline Vector random_interior(std::size_t d, RandomStream& rng, double lo, double hi) {
  Vector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

inline Vector random_hull_point(const ActionSet& S, RandomStream& rng) {
  Vector p(static_cast<Eigen::Index>(S.size()));
  for (Eigen::Index v = 0; v < p.size(); ++v) p[v] = -std::log(1.0 - rng.uniform());
  p /= p.sum();
  return S.matrix().transpose() * p;
}

/// exp-type omega-potential handled by the generic quadrature path.
inline Potential generic_exp_potential(double eta) {
  OmegaPotential p;
  p.psi = [=](double x) { return std::exp(eta * x); };
  p.psi_inverse = [=](double u) { return std::log(u) / eta; };
  p.psi_derivative = [=](double x) { return eta * std::exp(eta * x); };
  p.name = "exp";
  return Potential::omega(p);
}

/// Smallest D(u,w') - D(u,w_hat) - D(w_hat,w') over `instances` projections
/// and 100 random u in Conv(S) each.
inline PropertyResult pythagorean(const Potential& P, std::size_t instances = 100, std::uint64_t seed = 1) {
  PropertyResult r{"pythagorean " + P.describe(), std::numeric_limits<double>::infinity(), 1e-6, 0, true};
  const auto sets = sample_sets();
  RandomStream rng(seed, 0);
  for (std::size_t i = 0; i < instances; ++i) {
    const ActionSet& S = sets[i % sets.size()];
    const Vector w_prime = random_interior(S.dim(), rng, 0.05, 2.0);
    const Vector w_hat = bregman_project(P, S, w_prime).w;
    for (int j = 0; j < 100; ++j)
      r.worst = std::min(r.worst, pythagorean_margin(P, random_hull_point(S, rng), w_hat, w_prime));
    ++r.instances;
  }
  r.ok = r.worst >= -r.tolerance;
  return r;
}

/// Largest violation of sum p = 1, p >= 0, mean = w, support <= d+1.
inline PropertyResult decomposition(std::size_t instances = 100, std::uint64_t seed = 2) {
  PropertyResult r{"decomposition", 0.0, 1e-8, 0, true};
  const auto sets = sample_sets();
  RandomStream rng(seed, 0);
  for (std::size_t i = 0; i < instances; ++i) {
    const ActionSet& S = sets[i % sets.size()];
    const Vector w = i % 7 == 0 ? S.vertex(i % S.size()) : random_hull_point(S, rng);
    const VertexDistribution p = caratheodory_decompose(S, w);
    double err = std::abs(p.total() - 1.0);
    for (double x : p.prob) err = std::max(err, -x);
    err = std::max(err, (p.mean(S) - w).lpNorm<Eigen::Infinity>());
    if (p.support() > S.dim() + 1) err = std::numeric_limits<double>::infinity();
    r.worst = std::max(r.worst, err);
    ++r.instances;
  }
  r.ok = r.worst <= r.tolerance;
  return r;
}

inline VertexDistribution random_full_support(const ActionSet& S, RandomStream& rng) {
  Vector p(static_cast<Eigen::Index>(S.size()));
  for (Eigen::Index v = 0; v < p.size(); ++v) p[v] = 0.1 + rng.uniform();
  p /= p.sum();
  VertexDistribution out;
  for (Eigen::Index v = 0; v < p.size(); ++v) {
    out.index.push_back(static_cast<std::size_t>(v));
    out.prob.push_back(p[v]);
  }
  return out;
}

/// Largest |E[l~.v] - l.v| over v in S, with the expectation taken by
/// enumerating the played vertex; covers semi-bandit, bandit and spanner.
inline PropertyResult unbiasedness(std::size_t instances = 60, std::uint64_t seed = 3) {
  PropertyResult r{"estimator unbiasedness", 0.0, 1e-8, 0, true};
  const auto sets = sample_sets();
  RandomStream rng(seed, 0);
  for (std::size_t i = 0; i < instances; ++i) {
    const ActionSet& S = sets[i % sets.size()];
    const Vector loss = random_interior(S.dim(), rng, 0.0, 1.0);
    const Vector truth = S.matrix() * loss;
    const VertexDistribution p = random_full_support(S, rng);
    const Vector q = marginals(S, p);
    const Matrix pinv = pinv_psd(moment_matrix(S, p));
    Vector semi = Vector::Zero(loss.size()), bandit = Vector::Zero(loss.size());
    for (std::size_t j = 0; j < p.support(); ++j) {
      semi += p.prob[j] * estimate_semibandit(S, observe(S, loss, p.index[j], Feedback::semibandit), q);
      bandit += p.prob[j] * estimate_bandit(S, observe(S, loss, p.index[j], Feedback::bandit), pinv);
    }
    r.worst = std::max(r.worst, (semi - loss).lpNorm<Eigen::Infinity>());
    r.worst = std::max(r.worst, (S.matrix() * bandit - truth).lpNorm<Eigen::Infinity>());

    Exp2SpannerForecaster f(std::make_shared<const ActionSet>(S), 0.5, 0.3);
    for (int warm = 0; warm < 3; ++warm)
      f.update(observe(S, random_interior(S.dim(), rng, 0.0, 1.0), f.sample(rng), Feedback::bandit));
    Vector spanner = Vector::Zero(static_cast<Eigen::Index>(S.size()));
    for (Eigen::Index v = 0; v < f.probabilities().size(); ++v)
      if (f.probabilities()[v] > 0.0)
        spanner += f.probabilities()[v] * f.vertex_estimates(observe(S, loss, static_cast<std::size_t>(v), Feedback::bandit));
    r.worst = std::max(r.worst, (spanner - truth).lpNorm<Eigen::Infinity>());
    ++r.instances;
  }
  r.ok = r.worst <= r.tolerance;
  return r;
}

/// Largest gap between the simplex normalization and the general solver,
/// both for single projections and along bandit trajectories.
inline PropertyResult inf_equivalence(std::size_t instances = 40, std::uint64_t seed = 4) {
  PropertyResult r{"simplex fast path equivalence", 0.0, 1e-8, 0, true};
  RandomStream rng(seed, 0);
  ProjectionOptions general;
  general.allow_fast_path = false;
  const std::vector<Potential> potentials{Potential::negentropy(0.3), Potential::poly(0.05, 2.0),
                                          Potential::poly(0.2, 3.0)};
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t d = 2 + i % 7;
    const auto S = std::make_shared<const ActionSet>(make_simplex(d));
    const Potential& P = potentials[i % potentials.size()];
    const Vector w_prime = random_interior(d, rng, 0.01, 1.5);
    const Vector fast = bregman_project(P, *S, w_prime).w;
    const Vector slow = bregman_project(P, *S, w_prime, general).w;
    r.worst = std::max(r.worst, (fast - slow).lpNorm<Eigen::Infinity>());

    ClebForecaster a(S, P, Vector::Ones(static_cast<Eigen::Index>(d)));
    ClebForecaster b(S, P, Vector::Ones(static_cast<Eigen::Index>(d)), general);
    for (int t = 0; t < 20; ++t) {
      const Vector loss = random_interior(d, rng, 0.0, 1.0);
      const std::size_t played = a.sample(rng);
      const Feedback fb = P.family() == Potential::Family::poly ? Feedback::bandit : Feedback::full;
      a.update(observe(*S, loss, played, fb));
      b.update(observe(*S, loss, played, fb));
      r.worst = std::max(r.worst, (a.mean() - b.mean()).lpNorm<Eigen::Infinity>());
    }
    ++r.instances;
  }
  r.ok = r.worst <= r.tolerance;
  return r;
}

/// Largest entry of M M+ M - M and M+ M M+ - M+ over random PSD matrices of
/// every rank, relative to the matrix scale.
inline PropertyResult pinv_identities(std::size_t instances = 100, std::uint64_t seed = 5) {
  PropertyResult r{"pinv identities", 0.0, 1e-8, 0, true};
  RandomStream rng(seed, 0);
  for (std::size_t i = 0; i < instances; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(i % 7);
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(d)));
    Matrix G(d, rank);
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < rank; ++b) G(a, b) = rng.uniform() - 0.5;
    const Matrix M = G * G.transpose();
    const Matrix Mp = pinv_psd(M);
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    const double scale_p = std::max(1.0, Mp.cwiseAbs().maxCoeff());
    r.worst = std::max(r.worst, (M * Mp * M - M).cwiseAbs().maxCoeff() / scale);
    r.worst = std::max(r.worst, (Mp * M * Mp - Mp).cwiseAbs().maxCoeff() / scale_p);
    ++r.instances;
  }
  r.ok = r.worst <= r.tolerance;
  return r;
}

inline std::vector<PropertyResult> all() {
  return {pythagorean(Potential::negentropy(0.7)),
          pythagorean(Potential::poly(0.5, 2.0)),
          pythagorean(Potential::poly(1.5, 3.0)),
          pythagorean(generic_exp_potential(0.9)),
          decomposition(),
          unbiasedness(),
          inf_equivalence(),
          pinv_identities()};
}

}  // namespace cleb::properties
