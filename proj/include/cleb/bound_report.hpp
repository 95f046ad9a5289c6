#pragma once

#include <cstddef>
#include <ostream>
#include <string>

namespace cleb {

/// Outcome of comparing a measured quantity against a stated bound.
struct BoundReport {
  enum class Mode { exact, monte_carlo };

  std::string id;
  double measured = 0.0;
  double bound = 0.0;
  /// Signed slack: bound - measured for upper bounds, measured - bound for lower bounds.
  double margin = 0.0;
  bool lower = false;
  bool pass = false;
  Mode mode = Mode::exact;
  std::size_t reps = 0;
  double stderr_ = 0.0;
  std::string detail;
};

inline constexpr double kExactSlack = 1e-9;
inline constexpr double kSigmaMultiplier = 3.0;

/// Pass rule: measured <= bound + tol (upper) or measured >= bound - tol
/// (lower), with tol = 1e-9 in exact mode and 3 * stderr in Monte Carlo mode.
inline BoundReport make_report(std::string id, double measured, double bound, bool lower, BoundReport::Mode mode,
                               std::size_t reps = 0, double stderr_value = 0.0, std::string detail = {}) {
  BoundReport r;
  r.id = std::move(id);
  r.measured = measured;
  r.bound = bound;
  r.lower = lower;
  r.mode = mode;
  r.reps = reps;
  r.stderr_ = mode == BoundReport::Mode::exact ? 0.0 : stderr_value;
  r.detail = std::move(detail);
  r.margin = lower ? measured - bound : bound - measured;
  const double tol = mode == BoundReport::Mode::exact ? kExactSlack : kSigmaMultiplier * r.stderr_;
  r.pass = r.margin >= -tol;
  return r;
}

inline std::ostream& operator<<(std::ostream& os, const BoundReport& r) {
  os << (r.pass ? "PASS " : "FAIL ") << r.id << ": measured=" << r.measured << (r.lower ? " >= " : " <= ")
     << "bound=" << r.bound << " margin=" << r.margin;
  if (r.mode == BoundReport::Mode::monte_carlo) os << " (monte carlo, reps=" << r.reps << ", stderr=" << r.stderr_ << ")";
  else os << " (exact)";
  if (!r.detail.empty()) os << " " << r.detail;
  return os;
}

}  // namespace cleb
