#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cleb/action_set.hpp"
#include "cleb/error.hpp"
#include "cleb/geometry.hpp"
#include "cleb/potential.hpp"
#include "cleb/rng.hpp"
#include "cleb/spec_string.hpp"

namespace cleb {

enum class Feedback { full, semibandit, bandit };
enum class Constraint { linf, l2 };

inline Feedback parse_feedback(const std::string& s) {
  if (s == "full") return Feedback::full;
  if (s == "semibandit" || s == "semi-bandit") return Feedback::semibandit;
  if (s == "bandit") return Feedback::bandit;
  throw DomainError("unknown feedback '" + s + "'");
}

inline Constraint parse_constraint(const std::string& s) {
  if (s == "linf" || s == "Linf") return Constraint::linf;
  if (s == "l2" || s == "L2") return Constraint::l2;
  throw DomainError("unknown constraint '" + s + "'");
}

inline std::string to_string(Feedback f) {
  switch (f) {
    case Feedback::full: return "full";
    case Feedback::semibandit: return "semibandit";
    case Feedback::bandit: return "bandit";
  }
  return {};
}

inline std::string to_string(Constraint c) { return c == Constraint::linf ? "linf" : "l2"; }

/// What the forecaster sees after playing `vertex`.
struct Observation {
  Feedback feedback = Feedback::full;
  std::size_t vertex = 0;
  Vector coords;        // full: the loss; semibandit: loss_i on chosen coordinates, 0 elsewhere
  double scalar = 0.0;  // loss . V
};

inline Observation observe(const ActionSet& S, const Vector& loss, std::size_t vertex, Feedback feedback) {
  Observation obs;
  obs.feedback = feedback;
  obs.vertex = vertex;
  const Vector v = S.vertex(vertex);
  obs.scalar = loss.dot(v);
  if (feedback == Feedback::full) obs.coords = loss;
  if (feedback == Feedback::semibandit) obs.coords = loss.cwiseProduct(v);
  return obs;
}

/// q_i = P(V_i = 1) under p.
inline Vector marginals(const ActionSet& S, const VertexDistribution& p) { return p.mean(S); }

/// P = E_{V~p} V V^T.
inline Matrix moment_matrix(const ActionSet& S, const VertexDistribution& p) {
  const auto d = static_cast<Eigen::Index>(S.dim());
  Matrix M = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < p.support(); ++j) {
    if (p.prob[j] == 0.0) continue;
    const Vector v = S.vertex(p.index[j]);
    M.noalias() += p.prob[j] * v * v.transpose();
  }
  return M;
}

inline Vector estimate_full(const Observation& obs) { return obs.coords; }

/// l~_i = l_i V_i / q_i.
inline Vector estimate_semibandit(const ActionSet& S, const Observation& obs, const Vector& q) {
  const Vector v = S.vertex(obs.vertex);
  Vector est = Vector::Zero(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    if (!(q[i] >= 1e-12))
      throw NumericUnderflowError("semi-bandit estimator: probability of coordinate " + std::to_string(i + 1) +
                                  " is " + std::to_string(q[i]));
    est[i] = obs.coords[i] / q[i];
  }
  return est;
}

/// l~ = P^+ V V^T l, using only the scalar loss V^T l.
inline Vector estimate_bandit(const ActionSet& S, const Observation& obs, const Matrix& moment_pinv) {
  return moment_pinv * S.vertex(obs.vertex) * obs.scalar;
}

inline Vector estimate(const ActionSet& S, const Observation& obs, const VertexDistribution& p) {
  switch (obs.feedback) {
    case Feedback::full: return estimate_full(obs);
    case Feedback::semibandit: return estimate_semibandit(S, obs, marginals(S, p));
    case Feedback::bandit: return estimate_bandit(S, obs, pinv_psd(moment_matrix(S, p)));
  }
  return {};
}

/// Runtime check of the two per-vertex regret inequalities
///   sum_t l~_t.w_t - sum_t l~_t.u <= D(u, w_1) + sum_t c_t
/// where c_t is either the conjugate divergence term or its quadratic
/// upper bound. Panel = every vertex of S when |S| <= kPanelLimit.
class RegretInvariant {
 public:
  static constexpr std::size_t kPanelLimit = 64;

  RegretInvariant() = default;
  explicit RegretInvariant(Vector initial_div) : initial_(std::move(initial_div)), lhs_(Vector::Zero(initial_.size())) {
    active_ = initial_.size() > 0;
  }

  bool active() const noexcept { return active_; }
  std::size_t rounds() const noexcept { return rounds_; }

  /// `played` is l~.w_t and `per_vertex` holds l~.u for each panel vertex.
  void record(double played, const Vector& per_vertex, double conjugate_term, double quadratic_term) {
    if (!active_) return;
    lhs_.array() += played - per_vertex.array();
    conjugate_ += conjugate_term;
    quadratic_ += quadratic_term;
    ++rounds_;
    const double base = (initial_ - lhs_).minCoeff();
    worst_conjugate_ = std::min(worst_conjugate_, base + conjugate_);
    worst_quadratic_ = std::min(worst_quadratic_, base + quadratic_);
  }

  /// Smallest slack of the conjugate-divergence inequality over all rounds and panel vertices.
  double conjugate_margin() const noexcept { return worst_conjugate_; }
  /// Smallest slack of the quadratic inequality over all rounds and panel vertices.
  double quadratic_margin() const noexcept { return worst_quadratic_; }

 private:
  bool active_ = false;
  Vector initial_;
  Vector lhs_;
  double conjugate_ = 0.0;
  double quadratic_ = 0.0;
  double worst_conjugate_ = std::numeric_limits<double>::infinity();
  double worst_quadratic_ = std::numeric_limits<double>::infinity();
  std::size_t rounds_ = 0;
};

/// Common interface of all forecasters. A forecaster owns its state; the
/// game runner supplies the random stream used for sampling.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::unique_ptr<Forecaster> clone() const = 0;
  virtual std::string name() const = 0;
  /// Sampling distribution p_t.
  virtual const VertexDistribution& distribution() const = 0;
  /// w_t = E_{V~p_t} V.
  virtual Vector mean() const = 0;
  virtual void update(const Observation& obs) = 0;
  /// Estimate used in the last update.
  const Vector& last_estimate() const noexcept { return last_estimate_; }

  /// Inverse-CDF draw from p_t using one uniform variate.
  std::size_t sample(RandomStream& rng) const {
    const auto& p = distribution();
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t last = p.index.front();
    for (std::size_t j = 0; j < p.support(); ++j) {
      if (p.prob[j] <= 0.0) continue;
      cumulative += p.prob[j];
      last = p.index[j];
      if (u < cumulative) return p.index[j];
    }
    return last;
  }

  const RegretInvariant& invariant() const noexcept { return invariant_; }

 protected:
  RegretInvariant invariant_;
  Vector last_estimate_;
};

/// Mirror descent with Bregman projections onto Conv(S), for a coordinate-
/// separable potential.
class ClebForecaster : public Forecaster {
 public:
  ClebForecaster(std::shared_ptr<const ActionSet> S, Potential P, const Vector& anchor, ProjectionOptions options = {},
                 std::string name = "cleb")
      : S_(std::move(S)), P_(std::move(P)), options_(options), name_(std::move(name)) {
    const ProjectionResult r = bregman_project(P_, *S_, anchor, options_);
    w_ = r.w;
    p_ = r.distribution;
    w1_ = w_;
    if (S_->size() <= RegretInvariant::kPanelLimit) {
      Vector init(static_cast<Eigen::Index>(S_->size()));
      const Vector w1 = clamped(w1_);
      for (std::size_t v = 0; v < S_->size(); ++v) init[static_cast<Eigen::Index>(v)] = P_.bregman_div(S_->vertex(v), w1);
      invariant_ = RegretInvariant(init);
    }
  }

  std::unique_ptr<Forecaster> clone() const override { return std::make_unique<ClebForecaster>(*this); }
  std::string name() const override { return name_; }
  const VertexDistribution& distribution() const override { return p_; }
  Vector mean() const override { return w_; }
  const Potential& potential() const noexcept { return P_; }
  const Vector& initial_point() const noexcept { return w1_; }
  /// Largest amount any coordinate was raised by the interior clamp.
  double max_clamp() const noexcept { return max_clamp_; }

  void update(const Observation& obs) override {
    const Vector wc = clamped(w_);
    const Vector est = estimate(*S_, obs, p_);
    last_estimate_ = est;
    const Vector grad = P_.grad(wc);
    const Vector theta = P_.dual_step(wc, est);
    if (invariant_.active()) {
      double quadratic = 0.0;
      for (Eigen::Index i = 0; i < est.size(); ++i) {
        const double x = grad[i];
        const double curv = std::max(P_.primal_derivative(x), P_.primal_derivative(theta[i]));
        quadratic += 0.5 * est[i] * est[i] * curv;
      }
      invariant_.record(est.dot(wc), S_->matrix() * est, P_.conjugate_div(theta, grad), quadratic);
    }
    const ProjectionResult r = bregman_project_dual(P_, *S_, theta, options_, &p_);
    w_ = r.w;
    p_ = r.distribution;
  }

 private:
  Vector clamped(const Vector& w) {
    Vector out = w;
    const double floor = P_.floor();
    for (Eigen::Index i = 0; i < out.size(); ++i)
      if (out[i] < floor) {
        max_clamp_ = std::max(max_clamp_, floor - out[i]);
        out[i] = floor;
      }
    return out;
  }

  std::shared_ptr<const ActionSet> S_;
  Potential P_;
  ProjectionOptions options_;
  std::string name_;
  Vector w_;
  Vector w1_;
  VertexDistribution p_;
  double max_clamp_ = 0.0;
};

namespace detail {

/// Normalized probabilities from log-weights by max subtraction.
inline Vector softmax(const Vector& logw) {
  const double top = logw.maxCoeff();
  Vector p = (logw.array() - top).exp();
  return p / p.sum();
}

inline VertexDistribution dense_distribution(const Vector& p) {
  VertexDistribution out;
  out.index.resize(static_cast<std::size_t>(p.size()));
  out.prob.resize(static_cast<std::size_t>(p.size()));
  for (Eigen::Index v = 0; v < p.size(); ++v) {
    out.index[static_cast<std::size_t>(v)] = static_cast<std::size_t>(v);
    out.prob[static_cast<std::size_t>(v)] = p[v];
  }
  return out;
}

}  // namespace detail

/// Exponential weights over the vertices of S, kept in log space.
class Exp2Forecaster : public Forecaster {
 public:
  Exp2Forecaster(std::shared_ptr<const ActionSet> S, double eta, std::string name = "exp2")
      : S_(std::move(S)), eta_(eta), name_(std::move(name)) {
    if (!(eta > 0.0)) throw DomainError("exp2 requires eta > 0");
    logw_ = Vector::Zero(static_cast<Eigen::Index>(S_->size()));
    refresh();
    if (S_->size() <= RegretInvariant::kPanelLimit)
      invariant_ = RegretInvariant(Vector::Constant(logw_.size(), std::log(static_cast<double>(S_->size())) / eta_));
  }

  std::unique_ptr<Forecaster> clone() const override { return std::make_unique<Exp2Forecaster>(*this); }
  std::string name() const override { return name_; }
  const VertexDistribution& distribution() const override { return p_; }
  Vector mean() const override { return w_; }
  const Vector& probabilities() const noexcept { return prob_; }
  double eta() const noexcept { return eta_; }

  void update(const Observation& obs) override {
    const Vector est = estimate(*S_, obs, p_);
    last_estimate_ = est;
    update_vertex_losses(S_->matrix() * est);
  }

  /// Multiplicative update with per-vertex losses c_v = l~.v.
  void update_vertex_losses(const Vector& c) {
    if (invariant_.active()) {
      double conjugate = 0.0, quadratic = 0.0;
      for (Eigen::Index v = 0; v < c.size(); ++v) {
        const double z = -eta_ * c[v];
        conjugate += prob_[v] * (std::expm1(z) - z) / eta_;
        quadratic += 0.5 * eta_ * prob_[v] * c[v] * c[v] * std::max(1.0, std::exp(z));
      }
      invariant_.record(prob_.dot(c), c, conjugate, quadratic);
    }
    logw_ -= eta_ * c;
    logw_.array() -= logw_.maxCoeff();
    refresh();
  }

 private:
  void refresh() {
    prob_ = detail::softmax(logw_);
    p_ = detail::dense_distribution(prob_);
    w_ = S_->matrix().transpose() * prob_;
  }

  std::shared_ptr<const ActionSet> S_;
  double eta_;
  std::string name_;
  Vector logw_;
  Vector prob_;
  VertexDistribution p_;
  Vector w_;
};

/// Exponential weights for bandit feedback with loss estimates expressed in
/// a barycentric spanner basis and forced exploration uniform over the basis.
class Exp2SpannerForecaster : public Forecaster {
 public:
  Exp2SpannerForecaster(std::shared_ptr<const ActionSet> S, double eta, double gamma, double C = 1.01,
                        std::string name = "exp2spanner")
      : S_(std::move(S)), eta_(eta), gamma_(gamma), name_(std::move(name)) {
    if (!(eta > 0.0)) throw DomainError("exp2spanner requires eta > 0");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("exploration weight must lie in [0, 1]");
    basis_ = barycentric_spanner(*S_, C);
    Z_.resize(static_cast<Eigen::Index>(basis_.m), static_cast<Eigen::Index>(S_->size()));
    for (std::size_t v = 0; v < S_->size(); ++v) Z_.col(static_cast<Eigen::Index>(v)) = basis_.t2(S_->vertex(v));
    logw_ = Vector::Zero(static_cast<Eigen::Index>(S_->size()));
    refresh();
  }

  std::unique_ptr<Forecaster> clone() const override { return std::make_unique<Exp2SpannerForecaster>(*this); }
  std::string name() const override { return name_; }
  const VertexDistribution& distribution() const override { return p_; }
  Vector mean() const override { return w_; }
  const SpannerBasis& basis() const noexcept { return basis_; }
  const Vector& probabilities() const noexcept { return sampling_; }

  /// Per-vertex estimates (Q^+ T2(V) T2(V)^T T1(l))^T T2(v), using T2(V)^T T1(l) = l.V.
  Vector vertex_estimates(const Observation& obs) const {
    Matrix Q = Matrix::Zero(Z_.rows(), Z_.rows());
    for (Eigen::Index v = 0; v < Z_.cols(); ++v)
      if (sampling_[v] > 0.0) Q.noalias() += sampling_[v] * Z_.col(v) * Z_.col(v).transpose();
    if (psd_rank(Q) < Q.rows())
      throw EstimatorDegenerateError("spanner moment matrix is rank deficient");
    const Vector x = pinv_psd(Q) * Z_.col(static_cast<Eigen::Index>(obs.vertex)) * obs.scalar;
    return Z_.transpose() * x;
  }

  void update(const Observation& obs) override {
    const Vector c = vertex_estimates(obs);
    last_estimate_ = c;
    logw_ -= eta_ * c;
    logw_.array() -= logw_.maxCoeff();
    refresh();
  }

 private:
  void refresh() {
    sampling_ = (1.0 - gamma_) * detail::softmax(logw_);
    for (auto b : basis_.index) sampling_[static_cast<Eigen::Index>(b)] += gamma_ / static_cast<double>(basis_.m);
    p_ = detail::dense_distribution(sampling_);
    w_ = S_->matrix().transpose() * sampling_;
  }

  std::shared_ptr<const ActionSet> S_;
  double eta_;
  double gamma_;
  std::string name_;
  SpannerBasis basis_;
  Matrix Z_;  // column v = T2(v)
  Vector logw_;
  Vector sampling_;
  VertexDistribution p_;
  Vector w_;
};

// ---- learning rates ---------------------------------------------------------

/// Parameters entering the tuned learning rates.
struct TuningContext {
  std::size_t d = 1;
  std::size_t n = 1;
  std::size_t k = 1;
  double q = 2.0;
};

/// max(log(d/k), 1).
inline double log_ratio_term(std::size_t d, std::size_t k) {
  return std::max(std::log(static_cast<double>(d) / static_cast<double>(k)), 1.0);
}

/// Learning rate prescribed by the named upper-bound result.
inline double auto_eta(const std::string& id, const TuningContext& c) {
  const double d = static_cast<double>(c.d), n = static_cast<double>(c.n), k = static_cast<double>(c.k), q = c.q;
  if (!(d > 0 && n > 0 && k > 0)) throw DomainError("auto_eta: parameters must be positive");
  const double log2 = std::log(2.0);
  if (id == "thm4" || id == "thm10") return std::sqrt(2.0 / n);
  if (id == "thm5") return std::sqrt(2.0 * d / n);
  if (id == "thm6" || id == "thm12") return std::sqrt(2.0 / (q * (q - 1.0) * n));
  if (id == "thm7") return std::sqrt(2.0 * d / (q * (q - 1.0) * n));
  if (id == "thm8" || id == "thm14") return std::sqrt(2.0 * log2 / (n * d));
  if (id == "thm9") return std::sqrt(2.0 * d * log2 / n);
  if (id == "thm11") return std::sqrt(2.0 * k * log_ratio_term(c.d, c.k) / (n * d));
  if (id == "thm11-l2") return k * std::sqrt(log_ratio_term(c.d, c.k) / (n * d));
  if (id == "thm13") return std::sqrt(2.0 * std::pow(d, 1.0 / q) / (q * (q - 1.0) * n));
  if (id == "thm15") return std::sqrt(2.0 * log2 / n);
  if (id == "polyinf") return std::sqrt(2.0) * std::pow(d, 1.0 / q - 0.5) / std::sqrt((q - 1.0) * n);
  throw DomainError("unknown tuning id '" + id + "'");
}

/// q = 1 + 1/log d, the exponent used with the L2 semi-bandit tuning.
inline double default_q_for_l2_semibandit(std::size_t d) { return 1.0 + 1.0 / std::log(static_cast<double>(d)); }

/// Parsed forecaster spec string.
struct ForecasterSpec {
  std::string kind;                  // exp2, linexp, linpoly, polyinf, exp2spanner
  std::optional<double> eta;         // explicit learning rate
  std::string tuning;                // tuning id when eta is automatic; empty = default for the game
  std::optional<double> q;           // poly exponent
  std::optional<double> anchor;      // constant anchor of the initial projection
  std::optional<double> gamma;       // spanner exploration weight
  double C = 1.01;                   // spanner approximation factor
};

inline ForecasterSpec parse_forecaster(const std::string& text) {
  const SpecString s = parse_spec(text);
  ForecasterSpec out;
  out.kind = s.kind;
  if (out.kind != "exp2" && out.kind != "linexp" && out.kind != "linpoly" && out.kind != "polyinf" &&
      out.kind != "exp2spanner")
    throw DomainError("unknown forecaster '" + out.kind + "'");
  const std::string eta = s.get("eta", "auto");
  if (eta == "auto") {
  } else if (eta.rfind("auto:", 0) == 0) {
    out.tuning = eta.substr(5);
  } else {
    out.eta = SpecString::parse_double(eta, "eta");
    if (!(*out.eta > 0.0)) throw DomainError("eta must be positive");
  }
  if (s.has("q")) {
    out.q = s.number("q");
    if (!(*out.q > 1.0)) throw DomainError("q must exceed 1");
  }
  if (s.has("anchor")) out.anchor = s.number("anchor");
  if (s.has("gamma")) out.gamma = s.number("gamma");
  if (s.has("C")) out.C = s.number("C");
  return out;
}

/// Tuning used when `eta=auto` for the given game.
inline std::string default_tuning(const std::string& kind, Feedback feedback, Constraint constraint) {
  const bool l2 = constraint == Constraint::l2;
  const bool semi = feedback == Feedback::semibandit;
  if (kind == "polyinf") return "polyinf";
  if (kind == "linexp") return semi ? "thm10" : (l2 ? "thm5" : "thm4");
  if (kind == "linpoly") return semi ? (l2 ? "thm13" : "thm12") : (l2 ? "thm7" : "thm6");
  return semi ? (l2 ? "thm15" : "thm14") : (l2 ? "thm9" : "thm8");
}

/// Fully resolved parameters of a forecaster for one game.
struct ResolvedForecaster {
  std::string kind;
  std::string tuning;
  double eta = 0.0;
  double q = 2.0;
  double anchor = 1.0;
  double gamma = 0.0;
  double C = 1.01;
};

inline ResolvedForecaster resolve_forecaster(const ForecasterSpec& spec, const ActionSet& S, std::size_t n,
                                             Feedback feedback, Constraint constraint) {
  ResolvedForecaster r;
  r.kind = spec.kind;
  r.tuning = spec.tuning.empty() ? default_tuning(spec.kind, feedback, constraint) : spec.tuning;
  TuningContext ctx;
  ctx.d = S.dim();
  ctx.n = n;
  ctx.k = S.max_norm();
  r.q = spec.q ? *spec.q : (r.tuning == "thm13" ? default_q_for_l2_semibandit(S.dim()) : 2.0);
  ctx.q = r.q;
  r.eta = spec.eta ? *spec.eta : auto_eta(r.tuning, ctx);
  const bool almost_symmetric_tuning = r.tuning.rfind("thm11", 0) == 0;
  r.anchor = spec.anchor ? *spec.anchor
                         : (almost_symmetric_tuning ? static_cast<double>(ctx.k) / static_cast<double>(ctx.d) : 1.0);
  r.gamma = spec.gamma ? *spec.gamma : std::pow(static_cast<double>(n), -1.0 / 3.0);
  r.C = spec.C;
  return r;
}

inline std::unique_ptr<Forecaster> make_forecaster(const ResolvedForecaster& r, std::shared_ptr<const ActionSet> S,
                                                   const ProjectionOptions& options = {}) {
  if (r.kind == "exp2") return std::make_unique<Exp2Forecaster>(std::move(S), r.eta);
  if (r.kind == "exp2spanner") return std::make_unique<Exp2SpannerForecaster>(std::move(S), r.eta, r.gamma, r.C);
  const Vector anchor = Vector::Constant(static_cast<Eigen::Index>(S->dim()), r.anchor);
  if (r.kind == "linexp")
    return std::make_unique<ClebForecaster>(std::move(S), Potential::negentropy(r.eta), anchor, options, "linexp");
  if (r.kind == "linpoly" || r.kind == "polyinf")
    return std::make_unique<ClebForecaster>(std::move(S), Potential::poly(r.eta, r.q), anchor, options, r.kind);
  throw DomainError("unknown forecaster '" + r.kind + "'");
}

}  // namespace cleb
