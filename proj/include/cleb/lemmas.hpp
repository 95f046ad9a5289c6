#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cleb/bound_report.hpp"
#include "cleb/error.hpp"

namespace cleb {

/// sum_i (1 - i/k) C(k,i)^2 c^i / sum_i C(k,i)^2 c^i, summed in log space.
inline double tech1_ratio(std::size_t k, double c) {
  if (k == 0) throw DomainError("tech1 requires k >= 1");
  if (!(c > 0.0)) throw DomainError("tech1 requires c > 0");
  const long double kk = static_cast<long double>(k);
  std::vector<long double> logs(k + 1);
  long double top = -std::numeric_limits<long double>::infinity();
  for (std::size_t i = 0; i <= k; ++i) {
    const long double ii = static_cast<long double>(i);
    const long double log_binom = std::lgamma(kk + 1) - std::lgamma(ii + 1) - std::lgamma(kk - ii + 1);
    logs[i] = 2 * log_binom + ii * std::log(static_cast<long double>(c));
    top = std::max(top, logs[i]);
  }
  long double num = 0, den = 0;
  for (std::size_t i = 0; i <= k; ++i) {
    const long double term = std::exp(logs[i] - top);
    num += (1 - static_cast<long double>(i) / kk) * term;
    den += term;
  }
  return static_cast<double>(num / den);
}

/// Distribution of a sum of independent Bernoulli variables, by convolution.
inline std::vector<long double> poisson_binomial(const std::vector<double>& probs) {
  std::vector<long double> mass{1.0L};
  for (double p : probs) {
    std::vector<long double> next(mass.size() + 1, 0.0L);
    for (std::size_t j = 0; j < mass.size(); ++j) {
      next[j] += mass[j] * (1.0L - p);
      next[j + 1] += mass[j] * p;
    }
    mass.swap(next);
  }
  return mass;
}

inline long double kl_divergence(const std::vector<long double>& a, const std::vector<long double>& b) {
  long double kl = 0;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] > 0) kl += a[j] * std::log(a[j] / b[j]);
  return std::max(kl, 0.0L);
}

/// KL between the sums of n+1 Bernoulli variables with parameters
/// (p, q x l, r x (n-l)) and (p', q x l, r x (n-l)).
inline double kl_binomials(std::size_t n, std::size_t l, double p, double p_prime, double q, double r) {
  std::vector<double> common(l, q);
  common.insert(common.end(), n - l, r);
  std::vector<double> a = common, b = common;
  a.push_back(p);
  b.push_back(p_prime);
  return static_cast<double>(kl_divergence(poisson_binomial(a), poisson_binomial(b)));
}

inline double kl_binomials_bound(std::size_t n, double p, double p_prime, double q) {
  return 2.0 * (p_prime - p) * (p_prime - p) / ((1.0 - p_prime) * (static_cast<double>(n) + 2.0) * q);
}

/// f(x) = -(x-1) + (x-1)^2/(2 x0) + log(x); the inequality states f >= 0 on [x0, inf).
inline double log4_margin(double x, double x0) {
  return -(x - 1.0) + (x - 1.0) * (x - 1.0) / (2.0 * x0) + std::log(x);
}

struct LemmaParams {
  std::size_t tech1_max_k = 500;
  std::vector<double> tech1_c{1.0, 1.25, 1.5, 1.75, 2.0};
  std::size_t kl_max_n = 32;
  std::vector<double> kl_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::size_t log4_points = 100;
  double log4_x_max = 5.0;
};

inline BoundReport verify_tech1(const LemmaParams& params = {}) {
  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_k = 0;
  double worst_c = 0.0;
  for (std::size_t k = 1; k <= params.tech1_max_k; ++k)
    for (double c : params.tech1_c) {
      const double r = tech1_ratio(k, c);
      if (r < worst) {
        worst = r;
        worst_k = k;
        worst_c = c;
      }
    }
  std::ostringstream detail;
  detail << "worst at k=" << worst_k << " c=" << worst_c;
  return make_report("tech1", worst, 1.0 / 3.0, true, BoundReport::Mode::exact, 0, 0.0, detail.str());
}

/// Reports the smallest value of bound - KL over the grid.
inline BoundReport verify_klbinomials(const LemmaParams& params = {}) {
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (std::size_t n = 1; n <= params.kl_max_n; ++n)
    for (std::size_t l = (n + 1) / 2; l <= n; ++l)
      for (double p : params.kl_grid)
        for (double pp : params.kl_grid) {
          if (!(pp > p)) continue;
          for (double q : {p, pp})
            for (double r : params.kl_grid) {
              if (l == n && r != params.kl_grid.front()) continue;  // no tail variables
              const double slack = kl_binomials_bound(n, p, pp, q) - kl_binomials(n, l, p, pp, q, r);
              if (slack < worst) {
                worst = slack;
                std::ostringstream w;
                w << "n=" << n << " l=" << l << " p=" << p << " p'=" << pp << " q=" << q << " r=" << r;
                where = w.str();
              }
            }
        }
  return make_report("klbinomials", worst, 0.0, true, BoundReport::Mode::exact, 0, 0.0, "min slack at " + where);
}

inline BoundReport verify_log4(const LemmaParams& params = {}) {
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  const std::size_t m = params.log4_points;
  for (std::size_t a = 0; a < m; ++a) {
    const double x0 = (static_cast<double>(a) + 0.5) / static_cast<double>(m);
    for (std::size_t b = 0; b < m; ++b) {
      const double x = x0 + (params.log4_x_max - x0) * static_cast<double>(b) / static_cast<double>(m - 1);
      const double f = log4_margin(x, x0);
      if (f < worst) {
        worst = f;
        std::ostringstream w;
        w << "x0=" << x0 << " x=" << x;
        where = w.str();
      }
    }
  }
  BoundReport r = make_report("log4", worst, 0.0, true, BoundReport::Mode::exact, 0, 0.0, "min margin at " + where);
  r.pass = worst >= -1e-12;
  return r;
}

inline BoundReport verify_lemma(const std::string& id, const LemmaParams& params = {}) {
  if (id == "tech1") return verify_tech1(params);
  if (id == "klbinomials") return verify_klbinomials(params);
  if (id == "log4") return verify_log4(params);
  throw DomainError("unknown lemma '" + id + "'");
}

}  // namespace cleb
