#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cleb/action_set.hpp"
#include "cleb/error.hpp"
#include "cleb/potential.hpp"

namespace cleb {

/// Probability vector over vertices of S, stored sparsely as parallel arrays.
struct VertexDistribution {
  std::vector<std::size_t> index;
  std::vector<double> prob;

  std::size_t support() const noexcept { return index.size(); }

  Vector mean(const ActionSet& S) const {
    Vector w = Vector::Zero(static_cast<Eigen::Index>(S.dim()));
    for (std::size_t j = 0; j < index.size(); ++j) w += prob[j] * S.vertex(index[j]);
    return w;
  }

  double total() const {
    double s = 0.0;
    for (double p : prob) s += p;
    return s;
  }

  /// Dense probability vector of length |S|.
  Vector dense(std::size_t size) const {
    Vector p = Vector::Zero(static_cast<Eigen::Index>(size));
    for (std::size_t j = 0; j < index.size(); ++j) p[static_cast<Eigen::Index>(index[j])] += prob[j];
    return p;
  }

  static VertexDistribution point_mass(std::size_t i) { return {{i}, {1.0}}; }
};

/// Solver budget and tolerances for projections and decompositions.
struct ProjectionOptions {
  double gap_tolerance = 1e-9;
  std::size_t max_iterations = 10000;
  bool allow_fast_path = true;
};

struct ProjectionResult {
  Vector w;
  VertexDistribution distribution;
  double gap = 0.0;
  std::size_t iterations = 0;
};

// ---- separable objectives ---------------------------------------------------

/// f(w) = F(w) - theta.w, minimized over Conv(S) this is the Bregman
/// projection of the point whose gradient is theta.
struct BregmanObjective {
  const Potential& potential;
  const Vector& theta;
  double lower() const { return potential.lower(); }
  double slope(Eigen::Index i, double x) const { return potential.dual(x) - theta[i]; }
  double curvature(Eigen::Index, double x) const { return potential.dual_derivative(x); }
};

/// f(w) = |w - target|^2 / 2.
struct EuclideanObjective {
  const Vector& target;
  double lower() const { return -std::numeric_limits<double>::infinity(); }
  double slope(Eigen::Index i, double x) const { return x - target[i]; }
  double curvature(Eigen::Index, double) const { return 1.0; }
};

/// f(w) = sum_i max(0, level - w_i)^2 / 2, zero exactly on {w >= level}.
struct HingeObjective {
  double level;
  double lower() const { return -std::numeric_limits<double>::infinity(); }
  double slope(Eigen::Index, double x) const { return x < level ? x - level : 0.0; }
  double curvature(Eigen::Index, double x) const { return x < level ? 1.0 : 1e-8; }
};

namespace detail {

inline double affine_tolerance() { return 1e-10; }

/// Rows 0..d-1 hold the atoms, the last row is all ones.
inline Matrix lifted_atoms(const ActionSet& S, const std::vector<std::size_t>& atoms) {
  const auto d = static_cast<Eigen::Index>(S.dim());
  Matrix M(d + 1, static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    M.col(static_cast<Eigen::Index>(j)).head(d) = S.vertex(atoms[j]);
    M(d, static_cast<Eigen::Index>(j)) = 1.0;
  }
  return M;
}

inline bool affinely_independent(const ActionSet& S, const std::vector<std::size_t>& atoms) {
  if (atoms.size() <= 1) return true;
  if (atoms.size() > S.dim() + 1) return false;
  Eigen::FullPivLU<Matrix> lu(lifted_atoms(S, atoms));
  lu.setThreshold(affine_tolerance());
  return static_cast<std::size_t>(lu.rank()) == atoms.size();
}

inline void drop_zero_atoms(std::vector<std::size_t>& atoms, std::vector<double>& lambda) {
  std::size_t out = 0;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (lambda[j] > 0.0) {
      atoms[out] = atoms[j];
      lambda[out] = lambda[j];
      ++out;
    }
  }
  atoms.resize(out);
  lambda.resize(out);
}

/// Removes atoms along null-space directions of the lifted atom matrix until the
/// atoms are affinely independent. The mean sum_j lambda_j v_j is unchanged.
/// The vertex `keep`, if present, is never the atom removed.
inline void reduce_atoms(const ActionSet& S, std::vector<std::size_t>& atoms, std::vector<double>& lambda,
                         std::optional<std::size_t> keep = std::nullopt) {
  drop_zero_atoms(atoms, lambda);
  while (atoms.size() > 1) {
    const Matrix M = lifted_atoms(S, atoms);
    Eigen::FullPivLU<Matrix> lu(M);
    lu.setThreshold(affine_tolerance());
    if (static_cast<std::size_t>(lu.rank()) == atoms.size()) break;
    Vector beta = lu.kernel().col(0);
    const auto kept = keep ? std::find(atoms.begin(), atoms.end(), *keep) : atoms.end();
    if (kept != atoms.end()) {
      const double b = beta[kept - atoms.begin()];
      if (b > 0.0) beta = -beta;
    } else if (beta.maxCoeff() <= 0.0) {
      beta = -beta;
    }
    double step = std::numeric_limits<double>::infinity();
    std::size_t hit = 0;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      const double b = beta[static_cast<Eigen::Index>(j)];
      if (b > 0.0 && lambda[j] / b < step) {
        step = lambda[j] / b;
        hit = j;
      }
    }
    for (std::size_t j = 0; j < atoms.size(); ++j)
      lambda[j] = std::max(0.0, lambda[j] - step * beta[static_cast<Eigen::Index>(j)]);
    lambda[hit] = 0.0;
    drop_zero_atoms(atoms, lambda);
  }
  double total = 0.0;
  for (double l : lambda) total += l;
  for (double& l : lambda) l /= total;
}

inline Vector atom_mean(const ActionSet& S, const std::vector<std::size_t>& atoms, const std::vector<double>& lambda) {
  Vector w = Vector::Zero(static_cast<Eigen::Index>(S.dim()));
  for (std::size_t j = 0; j < atoms.size(); ++j) w += lambda[j] * S.vertex(atoms[j]);
  return w;
}

/// An interior point of Conv(S): the uniform mixture of the lowest-index
/// vertex covering each coordinate.
inline void covering_start(const ActionSet& S, std::vector<std::size_t>& atoms, std::vector<double>& lambda) {
  atoms.clear();
  for (std::size_t i = 0; i < S.dim(); ++i) {
    bool have = false;
    for (auto a : atoms)
      if (S.bits(a)[i] == 1) have = true;
    if (have) continue;
    for (std::size_t v = 0; v < S.size(); ++v)
      if (S.bits(v)[i] == 1) {
        atoms.push_back(v);
        break;
      }
  }
  std::sort(atoms.begin(), atoms.end());
  lambda.assign(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
  reduce_atoms(S, atoms, lambda);
}

/// Minimizes the convex function with derivative D(a) = sum_i slope(w_i + a u_i) u_i
/// over a in [0, hi]; hi already keeps w + a u inside the domain.
template <class Objective>
double line_search(const Objective& f, const Vector& w, const Vector& u, double hi) {
  auto derivative = [&](double a, double* second) {
    double g = 0.0, h = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (u[i] == 0.0) continue;
      const double x = w[i] + a * u[i];
      g += f.slope(i, x) * u[i];
      if (second) h += f.curvature(i, x) * u[i] * u[i];
    }
    if (second) *second = h;
    return g;
  };
  if (!(hi > 0.0)) return 0.0;
  const double g0 = derivative(0.0, nullptr);
  if (g0 >= 0.0) return 0.0;
  double ghi = derivative(hi, nullptr);
  if (!std::isfinite(ghi)) ghi = std::numeric_limits<double>::infinity();
  if (ghi <= 0.0) return hi;
  double lo = 0.0, up = hi;
  double a = std::min(1.0, hi);
  bool finite = false;
  for (int it = 0; it < 200; ++it) {
    double h = 0.0;
    const double g = derivative(a, &h);
    finite = std::isfinite(g);
    if (!finite) {
      up = a;
    } else {
      if (g == 0.0) return a;
      (g < 0.0 ? lo : up) = a;
    }
    if (up - lo <= 1e-16 * std::max(1.0, up)) break;
    double next = (std::isfinite(g) && h > 0.0) ? a - g / h : lo - 1.0;
    if (!(next > lo && next < up)) next = 0.5 * (lo + up);
    if (std::abs(next - a) <= 1e-17 * std::max(1.0, a)) break;
    a = next;
  }
  return finite ? a : lo;
}

/// Largest step along u keeping every coordinate strictly above `lower`.
inline double domain_step(const Vector& w, const Vector& u, double lower) {
  double hi = std::numeric_limits<double>::infinity();
  if (!std::isfinite(lower)) return hi;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (u[i] < 0.0) hi = std::min(hi, (w[i] - lower) / -u[i]);
  return hi * (1.0 - 1e-12);
}

}  // namespace detail

/// Minimizes a separable convex objective over Conv(S) by fully corrective
/// Frank-Wolfe. The active atoms are kept affinely independent, so the
/// returned distribution has at most d+1 atoms and mean exactly w. On the
/// active face each inner iteration is a Newton step on the simplex weights
/// followed by an exact line search that drops atoms reaching zero weight.
template <class Objective>
ProjectionResult minimize_over_hull(const ActionSet& S, const Objective& f, const ProjectionOptions& options,
                                    const VertexDistribution* warm = nullptr) {
  std::vector<std::size_t> atoms;
  std::vector<double> lambda;
  if (warm && warm->support() > 0) {
    atoms = warm->index;
    lambda = warm->prob;
    detail::reduce_atoms(S, atoms, lambda);
  } else {
    detail::covering_start(S, atoms, lambda);
  }
  const auto d = static_cast<Eigen::Index>(S.dim());
  const Matrix& V = S.matrix();
  Vector w = detail::atom_mean(S, atoms, lambda);
  Vector g(d);
  double gap = std::numeric_limits<double>::infinity();
  // Set when an iteration leaves w bit-identical: the gap is then at its rounding floor.
  bool stalled = false;

  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    for (Eigen::Index i = 0; i < d; ++i) g[i] = f.slope(i, w[i]);
    const Vector scores = V * g;
    std::size_t best = 0;
    for (Eigen::Index v = 1; v < scores.size(); ++v)
      if (scores[v] < scores[static_cast<Eigen::Index>(best)]) best = static_cast<std::size_t>(v);
    gap = g.dot(w) - scores[static_cast<Eigen::Index>(best)];
    // Gap is compared relative to the gradient scale, which bounds its rounding floor.
    const double tolerance = options.gap_tolerance * std::max(1.0, g.cwiseAbs().maxCoeff());
    if (gap <= tolerance || (stalled && gap <= 1e3 * tolerance)) {
      ProjectionResult r;
      r.w = w;
      r.distribution = {atoms, lambda};
      r.gap = std::max(gap, 0.0);
      r.iterations = iter;
      return r;
    }

    // Newton direction on the active face.
    const auto m = static_cast<Eigen::Index>(atoms.size());
    Matrix A(d, m);
    for (Eigen::Index j = 0; j < m; ++j) A.col(j) = S.vertex(atoms[static_cast<std::size_t>(j)]);
    Vector h(d);
    for (Eigen::Index i = 0; i < d; ++i) h[i] = f.curvature(i, w[i]);
    Matrix K = Matrix::Zero(m + 1, m + 1);
    K.topLeftCorner(m, m) = A.transpose() * h.asDiagonal() * A;
    K.block(0, m, m, 1).setOnes();
    K.block(m, 0, 1, m).setOnes();
    Vector rhs = Vector::Zero(m + 1);
    rhs.head(m) = -(A.transpose() * g);
    Vector step_lambda;
    bool newton = false;
    // Frank-Wolfe gap restricted to the active face.
    double face_gap = 0.0;
    for (auto a : atoms) face_gap = std::max(face_gap, g.dot(w) - scores[static_cast<Eigen::Index>(a)]);
    if (m > 1 && face_gap > 0.5 * gap) {
      // Jacobi scaling: curvature near the boundary spans many orders of magnitude.
      Vector scale = Vector::Ones(m + 1);
      for (Eigen::Index j = 0; j < m; ++j) scale[j] = 1.0 / std::sqrt(std::max(K(j, j), 1e-300));
      Eigen::FullPivLU<Matrix> lu(scale.asDiagonal() * K * scale.asDiagonal());
      if (lu.isInvertible()) {
        step_lambda = scale.head(m).cwiseProduct(lu.solve(scale.cwiseProduct(rhs)).head(m));
        newton = (A.transpose() * g).dot(step_lambda) < 0.0;
      }
    }

    if (newton) {
      const Vector u = A * step_lambda;
      double hi = 1.0;
      std::size_t blocking = atoms.size();
      for (std::size_t j = 0; j < atoms.size(); ++j) {
        const double s = step_lambda[static_cast<Eigen::Index>(j)];
        if (s < 0.0 && lambda[j] / -s < hi) {
          hi = lambda[j] / -s;
          blocking = j;
        }
      }
      const double dom = detail::domain_step(w, u, f.lower());
      const bool blocked = blocking < atoms.size() && hi <= dom;
      hi = std::min(hi, dom);
      const double a = detail::line_search(f, w, u, hi);
      for (std::size_t j = 0; j < atoms.size(); ++j)
        lambda[j] = std::max(0.0, lambda[j] + a * step_lambda[static_cast<Eigen::Index>(j)]);
      if (blocked && a >= hi) lambda[blocking] = 0.0;
      detail::drop_zero_atoms(atoms, lambda);
    } else {
      // Frank-Wolfe step toward the best vertex, then restore independence.
      const Vector u = S.vertex(best) - w;
      const double hi = std::min(1.0, detail::domain_step(w, u, f.lower()));
      const double a = detail::line_search(f, w, u, hi);
      if (a <= 0.0)
        throw ConvergenceError("Frank-Wolfe step made no progress at gap " + std::to_string(gap), gap);
      for (double& l : lambda) l *= 1.0 - a;
      auto pos = std::find(atoms.begin(), atoms.end(), best);
      if (pos == atoms.end()) {
        atoms.push_back(best);
        lambda.push_back(a);
      } else {
        lambda[static_cast<std::size_t>(pos - atoms.begin())] += a;
      }
      if (a >= 1.0) {
        atoms = {best};
        lambda = {1.0};
      }
      detail::reduce_atoms(S, atoms, lambda, best);
    }
    double total = 0.0;
    for (double l : lambda) total += l;
    for (double& l : lambda) l /= total;
    Vector next = detail::atom_mean(S, atoms, lambda);
    stalled = next == w;
    w = std::move(next);
  }
  throw ConvergenceError("projection did not reach gap " + std::to_string(options.gap_tolerance) + " within " +
                             std::to_string(options.max_iterations) + " iterations (gap " + std::to_string(gap) + ")",
                         gap);
}

namespace detail {

/// Simplex projection: find C with sum_i psi(theta_i - C) = 1.
inline ProjectionResult simplex_projection(const Potential& P, const Vector& theta) {
  const auto d = theta.size();
  Vector w(d);
  if (P.family() == Potential::Family::negentropy) {
    const double top = theta.maxCoeff();
    for (Eigen::Index i = 0; i < d; ++i) w[i] = std::exp(P.eta() * (theta[i] - top));
    w /= w.sum();
  } else {
    auto mass = [&](double c, double* slope) {
      double s = 0.0, ds = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        s += P.primal(theta[i] - c);
        if (slope) ds -= P.primal_derivative(theta[i] - c);
      }
      if (slope) *slope = ds;
      return s - 1.0;
    };
    // The mass is decreasing in c. Bracket the root, expanding geometrically.
    double hi = theta.maxCoeff();
    double step = 1.0;
    while (!P.in_dual_range(theta.maxCoeff() - hi) || !(mass(hi, nullptr) < 0.0)) {
      hi = theta.maxCoeff() + step;
      step *= 2.0;
      if (!std::isfinite(hi)) throw ConvergenceError("simplex projection could not bracket its constant", 1.0);
    }
    const double top = theta.maxCoeff();
    double lo = hi;
    step = 1.0;
    for (int it = 0;; ++it) {
      if (it > 4000) throw ConvergenceError("simplex projection could not bracket its constant", 1.0);
      const double candidate = lo - step;
      if (!P.in_dual_range(top - candidate)) {
        step *= 0.5;
        continue;
      }
      lo = candidate;
      if (mass(lo, nullptr) > 0.0) break;
      step *= 2.0;
    }
    double c = 0.5 * (lo + hi);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(c)); ++it) {
      double slope = 0.0;
      const double m = mass(c, &slope);
      if (m == 0.0) break;
      (m > 0.0 ? lo : hi) = c;
      double next = slope < 0.0 ? c - m / slope : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      c = next;
    }
    for (Eigen::Index i = 0; i < d; ++i) w[i] = P.primal(theta[i] - c);
    w /= w.sum();
  }
  ProjectionResult r;
  r.w = w;
  // The standard basis is sorted lexicographically, so e_i has index d-1-i.
  for (Eigen::Index i = d; i-- > 0;) {
    r.distribution.index.push_back(static_cast<std::size_t>(d - 1 - i));
    r.distribution.prob.push_back(w[i]);
  }
  return r;
}

}  // namespace detail

/// argmin over Conv(S) of D_F(w, w') where grad F(w') = theta. Working from the
/// dual point avoids forming w', which may overflow.
inline ProjectionResult bregman_project_dual(const Potential& P, const ActionSet& S, const Vector& theta,
                                             const ProjectionOptions& options = {},
                                             const VertexDistribution* warm = nullptr) {
  if (theta.size() != static_cast<Eigen::Index>(S.dim())) throw DomainError("projection: dimension mismatch");
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (!P.in_dual_range(theta[i])) throw DomainError("projection: dual point outside the range of grad F");
  if (options.allow_fast_path && S.is_standard_basis()) return detail::simplex_projection(P, theta);
  BregmanObjective f{P, theta};
  return minimize_over_hull(S, f, options, warm);
}

/// argmin over Conv(S) of D_F(w, w_prime), w_prime in Int(D).
inline ProjectionResult bregman_project(const Potential& P, const ActionSet& S, const Vector& w_prime,
                                        const ProjectionOptions& options = {},
                                        const VertexDistribution* warm = nullptr) {
  return bregman_project_dual(P, S, P.grad(w_prime), options, warm);
}

/// D_F(u, w') - D_F(u, w_hat) - D_F(w_hat, w'); nonnegative at an exact projection.
inline double pythagorean_margin(const Potential& P, const Vector& u, const Vector& w_hat, const Vector& w_prime) {
  return P.bregman_div(u, w_prime) - P.bregman_div(u, w_hat) - P.bregman_div(w_hat, w_prime);
}

/// Writes w as a convex combination of at most d+1 vertices of S. Throws
/// InfeasibleError when w is farther than `tolerance` from Conv(S).
inline VertexDistribution caratheodory_decompose(const ActionSet& S, const Vector& w, double tolerance = 1e-8) {
  if (w.size() != static_cast<Eigen::Index>(S.dim())) throw DomainError("decomposition: dimension mismatch");
  ProjectionOptions options;
  options.gap_tolerance = 1e-15;
  EuclideanObjective f{w};
  ProjectionResult r = minimize_over_hull(S, f, options);
  const Vector certificate = w - r.w;
  const double distance = certificate.lpNorm<Eigen::Infinity>();
  if (distance > tolerance)
    throw InfeasibleError("point is at distance " + std::to_string(certificate.norm()) + " from Conv(S)", certificate,
                          certificate.squaredNorm());
  return r.distribution;
}

/// Reduces a distribution to affinely independent atoms with the same mean.
inline VertexDistribution caratheodory_reduce(const ActionSet& S, VertexDistribution p) {
  detail::reduce_atoms(S, p.index, p.prob);
  return p;
}

/// Witness for the almost-symmetry property of order k.
struct AlmostSymmetryCertificate {
  std::size_t k = 0;
  std::optional<Vector> witness;
};

/// Looks for z in Conv(S) with every coordinate at least k/(2d), after
/// checking that every vertex has at most k ones.
inline AlmostSymmetryCertificate check_almost_symmetric(const ActionSet& S, std::size_t k) {
  if (k == 0) throw DomainError("almost symmetry order must be positive");
  AlmostSymmetryCertificate cert;
  cert.k = k;
  if (S.max_norm() > k) return cert;
  const double level = static_cast<double>(k) / (2.0 * static_cast<double>(S.dim()));
  ProjectionOptions options;
  options.gap_tolerance = 1e-20;
  HingeObjective f{level};
  ProjectionResult r;
  try {
    r = minimize_over_hull(S, f, options);
  } catch (const ConvergenceError&) {
    return cert;
  }
  if (r.w.minCoeff() >= level - 1e-9) cert.witness = r.w;
  return cert;
}

// ---- linear algebra -----------------------------------------------------------

/// Moore-Penrose pseudoinverse of a symmetric positive semidefinite matrix;
/// eigenvalues below tol * lambda_max are treated as zero.
inline Matrix pinv_psd(const Matrix& M, double tol = 1e-10) {
  if (M.rows() != M.cols()) throw DomainError("pinv_psd: matrix is not square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10) throw DomainError("pinv_psd: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()));
  const Vector& ev = eig.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -1e-10) throw DomainError("pinv_psd: matrix is not positive semidefinite");
  const double cutoff = ev.size() > 0 ? tol * std::max(ev.maxCoeff(), 0.0) : 0.0;
  Vector inv = Vector::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > cutoff && ev[i] > 0.0) inv[i] = 1.0 / ev[i];
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

/// Number of eigenvalues kept by pinv_psd.
inline Eigen::Index psd_rank(const Matrix& M, double tol = 1e-10) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double cutoff = ev.size() > 0 ? tol * std::max(ev.maxCoeff(), 0.0) : 0.0;
  return (ev.array() > cutoff).count();
}

/// Vertices e_1..e_m of S forming a basis of span(S) in which every vertex has
/// coordinates bounded by C.
struct SpannerBasis {
  std::size_t m = 0;
  double C = 1.01;
  std::vector<std::size_t> index;
  Matrix basis;  // d x m, columns e_j

  /// T1(x) = (x.e_1, ..., x.e_m).
  Vector t1(const Vector& x) const { return basis.transpose() * x; }

  /// Coordinates of v in the basis; v must lie in the span.
  Vector t2(const Vector& v, double tolerance = 1e-9) const {
    const Vector c = basis.colPivHouseholderQr().solve(v);
    const double residual = (basis * c - v).norm();
    if (residual > tolerance) throw ResidualError("vector is not in the span of the spanner basis", residual);
    return c;
  }
};

enum class SpannerMap { t1, t2 };

inline Vector spanner_transform(const SpannerBasis& B, const Vector& x, SpannerMap which) {
  return which == SpannerMap::t1 ? B.t1(x) : B.t2(x);
}

/// C-approximate barycentric spanner by the determinant swap algorithm,
/// computed in an orthonormal coordinate system of span(S).
inline SpannerBasis barycentric_spanner(const ActionSet& S, double C = 1.01) {
  if (!(C > 1.0)) throw DomainError("spanner factor C must exceed 1");
  const Matrix X = S.matrix().transpose();  // d x |S|
  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  qr.setThreshold(1e-10);
  const auto m = qr.rank();
  const Matrix Q = Matrix(qr.householderQ()).leftCols(m);
  const Matrix Y = Q.transpose() * X;  // m x |S|

  // Greedy start: repeatedly take the vertex with the largest residual.
  std::vector<std::size_t> chosen;
  Matrix R = Y;
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index v = 0; v < R.cols(); ++v) {
      const double n = R.col(v).norm();
      if (n > best_norm + 1e-12) {
        best_norm = n;
        best = v;
      }
    }
    chosen.push_back(static_cast<std::size_t>(best));
    const Vector q = R.col(best) / best_norm;
    R -= q * (q.transpose() * R);
  }

  auto basis_matrix = [&]() {
    Matrix B(m, m);
    for (Eigen::Index j = 0; j < m; ++j) B.col(j) = Y.col(static_cast<Eigen::Index>(chosen[static_cast<std::size_t>(j)]));
    return B;
  };
  bool improved = true;
  std::size_t rounds = 0;
  while (improved && rounds < 10000) {
    improved = false;
    ++rounds;
    const Eigen::PartialPivLU<Matrix> lu(basis_matrix());
    const Matrix coeffs = lu.solve(Y);  // column v holds coordinates of vertex v
    for (Eigen::Index j = 0; j < m && !improved; ++j)
      for (Eigen::Index v = 0; v < coeffs.cols(); ++v)
        if (std::abs(coeffs(j, v)) > C) {
          chosen[static_cast<std::size_t>(j)] = static_cast<std::size_t>(v);
          improved = true;
          break;
        }
  }

  SpannerBasis out;
  out.m = static_cast<std::size_t>(m);
  out.C = C;
  out.index = chosen;
  out.basis.resize(static_cast<Eigen::Index>(S.dim()), m);
  for (Eigen::Index j = 0; j < m; ++j) out.basis.col(j) = S.vertex(chosen[static_cast<std::size_t>(j)]);
  return out;
}

/// Basis given explicitly by the caller.
inline SpannerBasis spanner_from_vectors(const std::vector<Vector>& vectors, double C = 1.01) {
  if (vectors.empty()) throw DomainError("spanner basis is empty");
  SpannerBasis out;
  out.m = vectors.size();
  out.C = C;
  out.basis.resize(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) out.basis.col(static_cast<Eigen::Index>(j)) = vectors[j];
  Eigen::FullPivLU<Matrix> lu(out.basis);
  if (lu.rank() != static_cast<Eigen::Index>(vectors.size())) throw DomainError("spanner vectors are dependent");
  return out;
}

}  // namespace cleb
