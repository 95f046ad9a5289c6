#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cleb/error.hpp"
#include "cleb/spec_string.hpp"

namespace cleb {

using Vector = Eigen::VectorXd;

/// Coordinates of w are raised to at least omega + kInteriorFloor before the
/// gradient of F is evaluated.
inline constexpr double kInteriorFloor = 1e-12;

/// A user supplied omega-potential psi : (-inf, a) -> (omega, inf), together
/// with its inverse and derivative.
struct OmegaPotential {
  std::function<double(double)> psi;
  std::function<double(double)> psi_inverse;
  std::function<double(double)> psi_derivative;
  double omega = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::string name = "omega";
};

/// Result of the grid check of the omega-potential axioms.
struct AxiomReport {
  bool ok = true;
  std::string failure;
};

/// Checks increasing, convex, the two limits and integrability of psi^{-1}
/// near omega on a log-spaced grid.
inline AxiomReport check_omega_axioms(const OmegaPotential& p) {
  AxiomReport report;
  auto fail = [&](std::string why) {
    report.ok = false;
    report.failure = std::move(why);
    return report;
  };
  // Grid of points x < upper: upper - 10^k when upper is finite, -10^k otherwise.
  std::vector<double> xs;
  for (int i = -24; i <= 32; ++i) {
    const double mag = std::pow(10.0, i / 4.0);
    xs.push_back(std::isfinite(p.upper) ? p.upper - mag : -mag);
  }
  if (!std::isfinite(p.upper))
    for (int i = 32; i >= -24; --i) xs.push_back(std::pow(10.0, i / 4.0) * 1e-3);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double prev_value = -std::numeric_limits<double>::infinity();
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (double x : xs) {
    const double v = p.psi(x);
    const double s = p.psi_derivative(x);
    if (!std::isfinite(v)) continue;
    if (v < p.omega) return fail("psi drops below omega at x=" + std::to_string(x));
    if (!(s > 0.0) && std::isfinite(s) && v > p.omega) return fail("psi' is not positive at x=" + std::to_string(x));
    if (v < prev_value) return fail("psi is not increasing at x=" + std::to_string(x));
    if (std::isfinite(s) && s < prev_slope * (1.0 - 1e-9) - 1e-300) return fail("psi is not convex at x=" + std::to_string(x));
    prev_value = v;
    if (std::isfinite(s)) prev_slope = s;
  }
  const double far_left = p.psi(xs.front());
  if (!(far_left - p.omega < 1e-3 * std::max(1.0, std::abs(p.omega)))) return fail("psi does not tend to omega at -infinity");
  const double near_upper = p.psi(xs.back());
  if (!(near_upper > 1e3 || !std::isfinite(near_upper))) return fail("psi does not blow up at its upper end");
  try {
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double mass = integrator.integrate([&](double s) { return std::abs(p.psi_inverse(s)); }, p.omega, p.omega + 1.0);
    if (!std::isfinite(mass)) return fail("psi^{-1} is not integrable near omega");
  } catch (const std::exception& e) {
    return fail(std::string("integrability check failed: ") + e.what());
  }
  return report;
}

/// Coordinate-separable Legendre function F(u) = sum_i f(u_i) on D = [omega, inf)^d.
///
/// The scalar maps are `dual(u) = f'(u)` (the coordinate of grad F) and its
/// inverse `primal(x)`. For the two closed-form families:
///   negentropy(eta): f(u) = u log(u) / eta, dual(u) = (log u + 1)/eta;
///   poly(eta, q):    f(u) = -q/((q-1) eta) u^{(q-1)/q}, dual = psi^{-1} with psi(x) = (-eta x)^{-q}.
/// Negentropy differs from the omega-potential exp(eta x) only by a linear
/// term, which leaves every divergence unchanged.
class Potential {
 public:
  enum class Family { negentropy, poly, omega };

  static Potential negentropy(double eta) {
    if (!(eta > 0.0)) throw DomainError("negentropy requires eta > 0");
    Potential p;
    p.family_ = Family::negentropy;
    p.eta_ = eta;
    return p;
  }

  static Potential poly(double eta, double q) {
    if (!(eta > 0.0)) throw DomainError("poly potential requires eta > 0");
    if (!(q > 1.0)) throw DomainError("poly potential requires q > 1");
    Potential p;
    p.family_ = Family::poly;
    p.eta_ = eta;
    p.q_ = q;
    return p;
  }

  static Potential omega(OmegaPotential psi) {
    if (!psi.psi || !psi.psi_inverse || !psi.psi_derivative)
      throw DomainError("omega-potential needs psi, its inverse and its derivative");
    if (psi.omega < 0.0) throw DomainError("omega must be nonnegative");
    const auto report = check_omega_axioms(psi);
    if (!report.ok) throw DomainError("not an omega-potential: " + report.failure);
    Potential p;
    p.family_ = Family::omega;
    p.generic_ = std::make_shared<const OmegaPotential>(std::move(psi));
    return p;
  }

  Family family() const noexcept { return family_; }
  double eta() const noexcept { return eta_; }
  double q() const noexcept { return q_; }
  /// Lower end omega of the domain D = [omega, inf)^d.
  double lower() const noexcept { return generic_ ? generic_->omega : 0.0; }
  double floor() const noexcept { return lower() + kInteriorFloor; }

  std::string describe() const {
    switch (family_) {
      case Family::negentropy: return "negentropy:eta=" + std::to_string(eta_);
      case Family::poly: return "poly:eta=" + std::to_string(eta_) + ",q=" + std::to_string(q_);
      case Family::omega: return generic_->name;
    }
    return {};
  }

  // ---- scalar maps ----------------------------------------------------

  double dual(double u) const {
    switch (family_) {
      case Family::negentropy: return (std::log(u) + 1.0) / eta_;
      case Family::poly: return -std::pow(u, -1.0 / q_) / eta_;
      case Family::omega: return generic_->psi_inverse(u);
    }
    return 0.0;
  }

  double primal(double x) const {
    switch (family_) {
      case Family::negentropy: return std::exp(eta_ * x - 1.0);
      case Family::poly: return std::pow(-eta_ * x, -q_);
      case Family::omega: return generic_->psi(x);
    }
    return 0.0;
  }

  /// Derivative of `dual`, i.e. (psi^{-1})'(u).
  double dual_derivative(double u) const {
    switch (family_) {
      case Family::negentropy: return 1.0 / (eta_ * u);
      case Family::poly: return std::pow(u, -1.0 - 1.0 / q_) / (q_ * eta_);
      case Family::omega: return 1.0 / generic_->psi_derivative(generic_->psi_inverse(u));
    }
    return 0.0;
  }

  /// Derivative of `primal`, i.e. psi'(x).
  double primal_derivative(double x) const {
    switch (family_) {
      case Family::negentropy: return eta_ * std::exp(eta_ * x - 1.0);
      case Family::poly: return q_ * eta_ * std::pow(-eta_ * x, -q_ - 1.0);
      case Family::omega: return generic_->psi_derivative(x);
    }
    return 0.0;
  }

  /// Whether x lies in the range of `dual` (the dual domain).
  bool in_dual_range(double x) const {
    if (!std::isfinite(x)) return false;
    switch (family_) {
      case Family::negentropy: return true;
      case Family::poly: return x < 0.0;
      case Family::omega: return x < generic_->upper;
    }
    return false;
  }

  /// Scalar F contribution f(u) for u in D. Only used for reporting.
  double value(double u) const {
    check_primal(u, false);
    switch (family_) {
      case Family::negentropy: return u > 0.0 ? u * std::log(u) / eta_ : 0.0;
      case Family::poly: return -q_ / ((q_ - 1.0) * eta_) * std::pow(u, (q_ - 1.0) / q_);
      case Family::omega: return integrate_dual(lower(), u);
    }
    return 0.0;
  }

  // ---- vector operations ----------------------------------------------

  /// grad F(u); every coordinate must be strictly above omega.
  Vector grad(const Vector& u) const {
    Vector g(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      check_primal(u[i], true);
      g[i] = dual(u[i]);
    }
    return g;
  }

  /// (grad F)^{-1}(x) = grad F*(x).
  Vector inverse_grad(const Vector& x) const {
    Vector u(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!in_dual_range(x[i]))
        throw StepInfeasibleError("dual coordinate " + std::to_string(i) + " = " + std::to_string(x[i]) +
                                      " is outside the range of grad F",
                                  static_cast<std::size_t>(i));
      u[i] = primal(x[i]);
    }
    return u;
  }

  /// The dual point grad F(w) - est of the mirror step, checked against the
  /// range of grad F.
  Vector dual_step(const Vector& w, const Vector& est) const {
    if (w.size() != est.size()) throw DomainError("gradient step: size mismatch");
    Vector x = grad(w) - est;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (!in_dual_range(x[i]))
        throw StepInfeasibleError("gradient step leaves the range of grad F at coordinate " + std::to_string(i),
                                  static_cast<std::size_t>(i));
    return x;
  }

  /// w' with grad F(w') = grad F(w) - est, coordinate-wise w'_i = psi(psi^{-1}(w_i) - est_i).
  Vector gradient_step(const Vector& w, const Vector& est) const {
    const Vector x = dual_step(w, est);
    Vector out = inverse_grad(x);
    for (Eigen::Index i = 0; i < out.size(); ++i)
      if (!std::isfinite(out[i]) || !(out[i] > lower()))
        throw StepInfeasibleError("gradient step is not representable at coordinate " + std::to_string(i),
                                  static_cast<std::size_t>(i));
    return out;
  }

  /// D_F(u, v) for u in D and v in Int(D).
  double bregman_div(const Vector& u, const Vector& v) const {
    if (u.size() != v.size()) throw DomainError("divergence: size mismatch");
    double total = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      check_primal(u[i], false);
      check_primal(v[i], true);
      total += coordinate_div(u[i], v[i]);
    }
    return std::max(total, 0.0);
  }

  /// D_{F*}(a, b) = sum_i int_{b_i}^{a_i} psi - (a_i - b_i) psi(b_i) for a, b in the dual domain.
  double conjugate_div(const Vector& a, const Vector& b) const {
    if (a.size() != b.size()) throw DomainError("conjugate divergence: size mismatch");
    double total = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (!in_dual_range(a[i]) || !in_dual_range(b[i]))
        throw DomainError("conjugate divergence: argument outside the dual domain");
      total += coordinate_conjugate_div(a[i], b[i]);
    }
    return std::max(total, 0.0);
  }

  /// Per-coordinate D_F term.
  double coordinate_div(double u, double v) const {
    switch (family_) {
      case Family::negentropy:
        return ((u > 0.0 ? u * std::log(u / v) : 0.0) - u + v) / eta_;
      case Family::poly: {
        const double e = 1.0 - 1.0 / q_;
        return (std::pow(v, e) / (q_ - 1.0) - q_ * std::pow(u, e) / (q_ - 1.0) + u * std::pow(v, -1.0 / q_)) / eta_;
      }
      case Family::omega:
        return integrate_dual(v, u) - (u - v) * generic_->psi_inverse(v);
    }
    return 0.0;
  }

  double coordinate_conjugate_div(double a, double b) const {
    switch (family_) {
      case Family::negentropy: {
        // (e^{eta a - 1} - e^{eta b - 1})/eta - (a - b) e^{eta b - 1}
        const double hb = std::exp(eta_ * b - 1.0);
        const double z = eta_ * (a - b);
        return hb * (std::expm1(z) - z) / eta_;
      }
      case Family::poly: {
        auto anti = [&](double s) { return std::pow(-eta_ * s, 1.0 - q_) / (eta_ * (q_ - 1.0)); };
        return anti(a) - anti(b) - (a - b) * primal(b);
      }
      case Family::omega: {
        boost::math::quadrature::tanh_sinh<double> integrator;
        const double lo = std::min(a, b), hi = std::max(a, b);
        double integral = lo == hi ? 0.0 : integrator.integrate([&](double s) { return generic_->psi(s); }, lo, hi);
        if (a < b) integral = -integral;
        return integral - (a - b) * generic_->psi(b);
      }
    }
    return 0.0;
  }

 private:
  Potential() = default;

  void check_primal(double u, bool strict) const {
    const bool ok = strict ? u > lower() : u >= lower();
    if (!ok || !std::isfinite(u))
      throw DomainError("point " + std::to_string(u) + (strict ? " is not in the interior of D" : " is not in D"));
  }

  double integrate_dual(double from, double to) const {
    if (from == to) return 0.0;
    boost::math::quadrature::tanh_sinh<double> integrator(15, 1e-10);
    const double lo = std::min(from, to), hi = std::max(from, to);
    const double r = integrator.integrate([&](double s) { return generic_->psi_inverse(s); }, lo, hi);
    return from <= to ? r : -r;
  }

  Family family_ = Family::negentropy;
  double eta_ = 1.0;
  double q_ = 2.0;
  std::shared_ptr<const OmegaPotential> generic_;
};

/// Parsed `negentropy:eta=<v|auto>` or `poly:eta=<v|auto>,q=<v>`; eta is
/// empty when left to automatic tuning.
struct PotentialSpec {
  Potential::Family family = Potential::Family::negentropy;
  std::optional<double> eta;
  double q = 2.0;

  Potential make(double resolved_eta) const {
    return family == Potential::Family::poly ? Potential::poly(resolved_eta, q) : Potential::negentropy(resolved_eta);
  }
};

inline PotentialSpec parse_potential(const std::string& text) {
  const SpecString spec = parse_spec(text);
  PotentialSpec out;
  if (spec.kind == "negentropy") {
    out.family = Potential::Family::negentropy;
  } else if (spec.kind == "poly") {
    out.family = Potential::Family::poly;
    out.q = spec.number("q");
    if (!(out.q > 1.0)) throw DomainError("poly potential requires q > 1");
  } else {
    throw DomainError("unknown potential '" + spec.kind + "'");
  }
  const std::string eta = spec.get("eta", "auto");
  if (eta.rfind("auto", 0) != 0) {
    out.eta = SpecString::parse_double(eta, "eta");
    if (!(*out.eta > 0.0)) throw DomainError("eta must be positive");
  }
  return out;
}

}  // namespace cleb
