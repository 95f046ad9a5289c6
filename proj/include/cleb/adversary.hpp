#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cleb/action_set.hpp"
#include "cleb/error.hpp"
#include "cleb/forecaster.hpp"
#include "cleb/rng.hpp"
#include "cleb/spec_string.hpp"

namespace cleb {

struct ValidationReport {
  bool ok = true;
  std::string violation;
};

/// Checks the loss vector against the L-infinity (0 <= l_i <= 1) or the L2
/// (l.v <= 1 for every vertex v) assumption. Losses must be nonnegative in both.
inline ValidationReport validate(Constraint constraint, const ActionSet& S, const Vector& loss, double slack = 1e-12) {
  ValidationReport r;
  if (loss.size() != static_cast<Eigen::Index>(S.dim())) return {false, "loss has the wrong dimension"};
  for (Eigen::Index i = 0; i < loss.size(); ++i) {
    if (!std::isfinite(loss[i])) return {false, "coordinate " + std::to_string(i + 1) + " is not finite"};
    if (loss[i] < 0.0) return {false, "coordinate " + std::to_string(i + 1) + " is negative"};
    if (loss[i] > 1.0 + slack) return {false, "coordinate " + std::to_string(i + 1) + " exceeds 1"};
  }
  if (constraint == Constraint::l2) {
    const Vector totals = S.matrix() * loss;
    Eigen::Index worst = 0;
    if (totals.maxCoeff(&worst) > 1.0 + slack)
      return {false, "vertex " + std::to_string(worst) + " has loss " + std::to_string(totals[worst]) + " > 1"};
  }
  return r;
}

/// Loss at rounds t = 1, 2, ... of the thm16 alternating adversary: odd
/// rounds hit the third quarter of the coordinates, even rounds the last one.
inline Vector thm16_alternating(std::size_t d, std::size_t t) {
  if (d < 4 || d % 4 != 0) throw DomainError("thm16 adversaries need d to be a positive multiple of 4");
  Vector loss = Vector::Zero(static_cast<Eigen::Index>(d));
  const std::size_t q = d / 4;
  const std::size_t start = (t % 2 == 1) ? d / 2 : d / 2 + q;
  loss.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(q)).setOnes();
  return loss;
}

/// Constant loss 1 - eps on the first quarter, 1 on the second, 0 elsewhere.
inline Vector thm16_epsilon(std::size_t d, double eps) {
  if (d < 4 || d % 4 != 0) throw DomainError("thm16 adversaries need d to be a positive multiple of 4");
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("eps must lie in [0, 1]");
  Vector loss = Vector::Zero(static_cast<Eigen::Index>(d));
  const auto q = static_cast<Eigen::Index>(d / 4);
  loss.head(q).setConstant(1.0 - eps);
  loss.segment(q, q).setOnes();
  return loss;
}

/// eps = min(log 2 / (eta n), 1).
inline double thm16_default_eps(double eta, std::size_t n) {
  return std::min(std::log(2.0) / (eta * static_cast<double>(n)), 1.0);
}

/// Coordinate means of the alpha-adversary: in pair i, the expert alpha_i
/// (coordinate 2i-1 for alpha_i = 1, 2i for alpha_i = 2) has mean 1/2, the
/// other one 1/2 + eps.
inline Vector alpha_means(const std::vector<int>& alpha, double eps) {
  if (!(eps >= 0.0 && eps <= 0.5)) throw DomainError("eps must lie in [0, 1/2]");
  Vector m(static_cast<Eigen::Index>(2 * alpha.size()));
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] != 1 && alpha[i] != 2) throw DomainError("alpha entries must be 1 or 2");
    const auto a = static_cast<Eigen::Index>(2 * i);
    m[a] = alpha[i] == 1 ? 0.5 : 0.5 + eps;
    m[a + 1] = alpha[i] == 2 ? 0.5 : 0.5 + eps;
  }
  return m;
}

/// alpha in {1,2}^{d/2} from a string of 0/1 characters (0 -> 1, 1 -> 2).
inline std::vector<int> parse_alpha(const std::string& bits) {
  std::vector<int> alpha;
  for (char c : bits) {
    if (c != '0' && c != '1') throw DomainError("alpha bitstring must contain only 0 and 1");
    alpha.push_back(c == '0' ? 1 : 2);
  }
  if (alpha.empty()) throw DomainError("alpha bitstring is empty");
  return alpha;
}

/// All 2^{pairs} alpha vectors, in lexicographic order.
inline std::vector<std::vector<int>> all_alphas(std::size_t pairs) {
  std::vector<std::vector<int>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << pairs); ++mask) {
    std::vector<int> a(pairs);
    for (std::size_t i = 0; i < pairs; ++i) a[i] = ((mask >> (pairs - 1 - i)) & 1U) ? 2 : 1;
    out.push_back(a);
  }
  return out;
}

/// Oblivious loss sequence generator. Every kind is multiplied by `scale`,
/// which is how L2 variants are obtained from L-infinity ones.
class Adversary {
 public:
  enum class Kind { fixed, bernoulli, thm16a, thm16e, alpha, thm18, alternating };

  static Adversary fixed(std::vector<Vector> rows, Constraint c = Constraint::linf) {
    if (rows.empty()) throw DomainError("fixed loss sequence is empty");
    Adversary a(Kind::fixed, static_cast<std::size_t>(rows.front().size()), c);
    for (const auto& r : rows)
      if (r.size() != rows.front().size()) throw DomainError("fixed loss rows have different lengths");
    a.rows_ = std::move(rows);
    return a;
  }

  static Adversary bernoulli(Vector means, Constraint c = Constraint::linf, double scale = 1.0) {
    for (Eigen::Index i = 0; i < means.size(); ++i)
      if (!(means[i] >= 0.0 && means[i] <= 1.0)) throw DomainError("Bernoulli means must lie in [0, 1]");
    Adversary a(Kind::bernoulli, static_cast<std::size_t>(means.size()), c, scale);
    a.means_ = std::move(means);
    return a;
  }

  static Adversary thm16a(std::size_t d, Constraint c = Constraint::linf, double scale = 1.0) {
    thm16_alternating(d, 1);
    return Adversary(Kind::thm16a, d, c, scale);
  }

  static Adversary thm16e(std::size_t d, double eps, Constraint c = Constraint::linf, double scale = 1.0) {
    Adversary a(Kind::thm16e, d, c, scale);
    a.eps_ = eps;
    a.means_ = thm16_epsilon(d, eps);
    return a;
  }

  static Adversary alpha(const std::vector<int>& alpha, double eps, Constraint c = Constraint::linf,
                         double scale = 1.0) {
    Adversary a(Kind::alpha, 2 * alpha.size(), c, scale);
    a.eps_ = eps;
    a.alpha_ = alpha;
    a.means_ = alpha_means(alpha, eps);
    return a;
  }

  /// alpha-adversary masked to one uniformly drawn coordinate per round.
  static Adversary thm18(const std::vector<int>& alpha, double eps, bool bandit, double scale = 1.0) {
    Adversary a(Kind::thm18, 2 * alpha.size(), Constraint::l2, scale);
    a.eps_ = eps;
    a.alpha_ = alpha;
    a.means_ = alpha_means(alpha, eps);
    a.bandit_tag_ = bandit;
    return a;
  }

  /// Deterministic sequence hitting `first` on odd rounds and `second` on even rounds.
  static Adversary alternating(Vector first, Vector second, Constraint c = Constraint::linf, double scale = 1.0) {
    if (first.size() != second.size()) throw DomainError("alternating losses have different lengths");
    Adversary a(Kind::alternating, static_cast<std::size_t>(first.size()), c, scale);
    a.rows_ = {std::move(first), std::move(second)};
    return a;
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return d_; }
  Constraint constraint() const noexcept { return constraint_; }
  double scale() const noexcept { return scale_; }
  double eps() const noexcept { return eps_; }
  const std::vector<int>& alpha_vector() const noexcept { return alpha_; }
  bool bandit_tag() const noexcept { return bandit_tag_; }

  bool deterministic() const noexcept {
    return kind_ == Kind::fixed || kind_ == Kind::thm16a || kind_ == Kind::thm16e || kind_ == Kind::alternating;
  }

  /// Expected loss vector at round t (1-based).
  Vector mean(std::size_t t) const {
    switch (kind_) {
      case Kind::fixed:
        if (t == 0 || t > rows_.size())
          throw DomainError("fixed loss sequence has " + std::to_string(rows_.size()) + " rows, round " +
                            std::to_string(t) + " requested");
        return scale_ * rows_[t - 1];
      case Kind::alternating: return scale_ * rows_[(t % 2 == 1) ? 0 : 1];
      case Kind::thm16a: return scale_ * thm16_alternating(d_, t);
      case Kind::thm16e:
      case Kind::bernoulli:
      case Kind::alpha: return scale_ * means_;
      case Kind::thm18: return scale_ * means_ / static_cast<double>(d_);
    }
    return {};
  }

  /// Realized loss at round t; consumes draws from `rng` for stochastic kinds.
  Vector draw(std::size_t t, RandomStream& rng) const {
    switch (kind_) {
      case Kind::bernoulli:
      case Kind::alpha: {
        Vector loss(static_cast<Eigen::Index>(d_));
        for (Eigen::Index i = 0; i < loss.size(); ++i) loss[i] = rng.bernoulli(means_[i]) ? scale_ : 0.0;
        return loss;
      }
      case Kind::thm18: {
        Vector loss = Vector::Zero(static_cast<Eigen::Index>(d_));
        const auto e = static_cast<Eigen::Index>(rng.index(d_));
        loss[e] = rng.bernoulli(means_[e]) ? scale_ : 0.0;
        return loss;
      }
      default: return mean(t);
    }
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::fixed: return "fixed";
      case Kind::bernoulli: return "bernoulli";
      case Kind::thm16a: return "thm16a";
      case Kind::thm16e: return "thm16e";
      case Kind::alpha: return "alpha";
      case Kind::thm18: return "thm18";
      case Kind::alternating: return "alternating";
    }
    return {};
  }

 private:
  Adversary(Kind kind, std::size_t d, Constraint c, double scale = 1.0)
      : kind_(kind), d_(d), constraint_(c), scale_(scale) {
    if (d_ == 0) throw DomainError("adversary dimension must be positive");
    if (!(scale_ > 0.0)) throw DomainError("adversary scale must be positive");
  }

  Kind kind_;
  std::size_t d_;
  Constraint constraint_;
  double scale_ = 1.0;
  double eps_ = 0.0;
  Vector means_;
  std::vector<int> alpha_;
  std::vector<Vector> rows_;
  bool bandit_tag_ = false;
};

/// Reads one loss vector per line (whitespace separated, '#' comments).
inline std::vector<Vector> read_loss_rows(std::istream& in) {
  std::vector<Vector> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<double> values;
    double x;
    while (ls >> x) values.push_back(x);
    if (!ls.eof()) throw DomainError("loss file: cannot parse line '" + line + "'");
    if (values.empty()) continue;
    rows.push_back(Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
  }
  return rows;
}

/// Indicator vector of a 0/1 character string.
inline Vector parse_mask(const std::string& bits) {
  Vector v(static_cast<Eigen::Index>(bits.size()));
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw DomainError("mask must contain only 0 and 1");
    v[static_cast<Eigen::Index>(i)] = bits[i] == '1' ? 1.0 : 0.0;
  }
  return v;
}

/// Values needed to resolve automatic adversary parameters.
struct AdversaryContext {
  std::size_t d = 0;
  std::size_t n = 1;
  double eta = 1.0;  // learning rate of the forecaster, for thm16e:eps=auto
  Constraint constraint = Constraint::linf;
};

/// Parses `thm16a`, `thm16e:eps=<v|auto>`, `alpha:eps=<v>,alpha=<bits>`,
/// `thm18:kind=<full|bandit>,eps=<v>[,alpha=<bits>]`, `bernoulli:means=<csv>`,
/// `alternating:first=<bits>,second=<bits>` and `fixed:<file>`. Every kind
/// accepts `scale=<v>`; `scale=auto` divides by d.
inline Adversary parse_adversary(const std::string& text, const AdversaryContext& ctx) {
  const SpecString s = parse_spec(text);
  const std::string scale_text = s.get("scale", "1");
  const double scale =
      scale_text == "auto" ? 1.0 / static_cast<double>(ctx.d) : SpecString::parse_double(scale_text, "scale");
  const Constraint c = ctx.constraint;
  auto check_dim = [&](const Adversary& a) {
    if (ctx.d != 0 && a.dim() != ctx.d)
      throw DomainError("adversary dimension " + std::to_string(a.dim()) + " differs from d=" + std::to_string(ctx.d));
    return a;
  };
  auto eps_or = [&](double fallback) { return s.has("eps") ? s.number("eps") : fallback; };
  auto alpha_or_default = [&]() {
    if (s.has("alpha")) return parse_alpha(s.get("alpha"));
    return std::vector<int>(ctx.d / 2, 1);
  };
  if (s.kind == "thm16a") return check_dim(Adversary::thm16a(ctx.d, c, scale));
  if (s.kind == "thm16e") {
    const std::string e = s.get("eps", "auto");
    const double eps = e == "auto" ? thm16_default_eps(ctx.eta, ctx.n) : SpecString::parse_double(e, "eps");
    return check_dim(Adversary::thm16e(ctx.d, eps, c, scale));
  }
  if (s.kind == "alpha") {
    if (!s.has("eps")) throw DomainError("alpha adversary requires eps");
    return check_dim(Adversary::alpha(alpha_or_default(), s.number("eps"), c, scale));
  }
  if (s.kind == "thm18") {
    const std::string kind = s.get("kind", "full");
    if (kind != "full" && kind != "bandit") throw DomainError("thm18 kind must be full or bandit");
    return check_dim(Adversary::thm18(alpha_or_default(), eps_or(0.0), kind == "bandit", scale));
  }
  if (s.kind == "bernoulli") {
    const auto values = SpecString::parse_list(s.get("means"), ',');
    if (values.empty()) throw DomainError("bernoulli adversary requires means");
    Vector m(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) m[static_cast<Eigen::Index>(i)] = values[i];
    if (m.size() == 1 && ctx.d > 1) m = Vector::Constant(static_cast<Eigen::Index>(ctx.d), m[0]);
    return check_dim(Adversary::bernoulli(m, c, scale));
  }
  if (s.kind == "alternating")
    return check_dim(Adversary::alternating(parse_mask(s.get("first")), parse_mask(s.get("second")), c, scale));
  if (s.kind == "fixed") {
    std::ifstream in(s.argument);
    if (!in) throw DomainError("cannot open loss file '" + s.argument + "'");
    std::vector<Vector> rows = read_loss_rows(in);
    if (scale != 1.0)
      for (auto& r : rows) r *= scale;
    return check_dim(Adversary::fixed(std::move(rows), c));
  }
  throw DomainError("unknown adversary '" + s.kind + "'");
}

}  // namespace cleb
