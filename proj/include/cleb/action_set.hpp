#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cleb/error.hpp"
#include "cleb/spec_string.hpp"

namespace cleb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using BinaryVector = std::vector<std::uint8_t>;

/// Finite set S of binary vectors in {0,1}^d, stored explicitly and sorted
/// lexicographically. Every index-based tie-break in the library refers to
/// this order.
class ActionSet {
 public:
  static constexpr std::size_t kDefaultCap = 100000;

  ActionSet(std::size_t d, std::vector<BinaryVector> vertices, std::string label = {})
      : d_(d), vertices_(std::move(vertices)), label_(std::move(label)) {
    if (d_ == 0) throw DomainError("action set dimension must be positive");
    if (vertices_.empty()) throw EmptySetError("action set is empty");
    for (const auto& v : vertices_) {
      if (v.size() != d_) throw DomainError("vertex length differs from dimension");
      for (auto x : v)
        if (x > 1) throw DomainError("vertex entries must be 0 or 1");
    }
    std::sort(vertices_.begin(), vertices_.end());
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
      throw DomainError("action set contains duplicate vertices");
    for (std::size_t i = 0; i < d_; ++i) {
      const bool covered = std::any_of(vertices_.begin(), vertices_.end(),
                                       [i](const BinaryVector& v) { return v[i] == 1; });
      if (!covered)
        throw DomainError("coordinate " + std::to_string(i + 1) + " is zero on every vertex");
    }
    matrix_.resize(static_cast<Eigen::Index>(vertices_.size()), static_cast<Eigen::Index>(d_));
    for (std::size_t r = 0; r < vertices_.size(); ++r)
      for (std::size_t c = 0; c < d_; ++c)
        matrix_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = vertices_[r][c];
  }

  std::size_t dim() const noexcept { return d_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  const std::string& label() const noexcept { return label_; }

  /// Vertices as the rows of a size() x dim() matrix.
  const Matrix& matrix() const noexcept { return matrix_; }
  Vector vertex(std::size_t i) const { return matrix_.row(static_cast<Eigen::Index>(i)).transpose(); }
  const BinaryVector& bits(std::size_t i) const { return vertices_.at(i); }
  const std::vector<BinaryVector>& vertices() const noexcept { return vertices_; }

  std::optional<std::size_t> find(const BinaryVector& v) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
    if (it == vertices_.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - vertices_.begin());
  }

  /// Largest L1 norm over the vertices.
  std::size_t max_norm() const {
    std::size_t best = 0;
    for (const auto& v : vertices_)
      best = std::max<std::size_t>(best, static_cast<std::size_t>(std::count(v.begin(), v.end(), 1)));
    return best;
  }

  /// True when S = {e_1, ..., e_d}.
  bool is_standard_basis() const { return size() == d_ && max_norm() == 1; }

 private:
  std::size_t d_;
  std::vector<BinaryVector> vertices_;
  std::string label_;
  Matrix matrix_;
};

namespace detail {

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

inline void check_cap(double count, std::size_t cap, const std::string& what) {
  if (count > static_cast<double>(cap))
    throw EnumerationLimitError(what + " has " + std::to_string(count) + " vertices, above the cap of " +
                                std::to_string(cap));
}

// Calls visit(mask) for each k-subset of {0..n-1}, as a 0/1 vector.
inline void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const BinaryVector&)>& visit) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  BinaryVector mask(n, 0);
  while (true) {
    std::fill(mask.begin(), mask.end(), 0);
    for (auto i : idx) mask[i] = 1;
    visit(mask);
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// All binary vectors of length d with exactly k ones.
inline ActionSet make_k_subsets(std::size_t d, std::size_t k, std::size_t cap = ActionSet::kDefaultCap) {
  if (d == 0 || k == 0 || k > d) throw DomainError("k-subsets require 1 <= k <= d");
  detail::check_cap(detail::binomial(d, k), cap, "k-subsets set");
  std::vector<BinaryVector> out;
  detail::for_each_subset(d, k, [&](const BinaryVector& m) { out.push_back(m); });
  return ActionSet(d, std::move(out), "ksubsets:d=" + std::to_string(d) + ",k=" + std::to_string(k));
}

/// The standard basis e_1..e_d (the expert setting).
inline ActionSet make_simplex(std::size_t d) {
  auto s = make_k_subsets(d, 1);
  return ActionSet(d, s.vertices(), "simplex:d=" + std::to_string(d));
}

/// Set on which EXP2 is suboptimal: d/4 ones among the first d/2 coordinates,
/// plus one of the two length-d/4 blocks of the second half.
inline ActionSet make_exp2_lowerbound_set(std::size_t d, std::size_t cap = ActionSet::kDefaultCap) {
  if (d < 4 || d % 4 != 0) throw DomainError("exp2 lower-bound set requires d to be a positive multiple of 4");
  const std::size_t half = d / 2, quarter = d / 4;
  detail::check_cap(2.0 * detail::binomial(half, quarter), cap, "exp2 lower-bound set");
  std::vector<BinaryVector> out;
  detail::for_each_subset(half, quarter, [&](const BinaryVector& m) {
    for (int block = 0; block < 2; ++block) {
      BinaryVector v(d, 0);
      std::copy(m.begin(), m.end(), v.begin());
      const std::size_t first = half + static_cast<std::size_t>(block) * quarter;
      for (std::size_t i = first; i < first + quarter; ++i) v[i] = 1;
      out.push_back(std::move(v));
    }
  });
  return ActionSet(d, std::move(out), "exp2lb:d=" + std::to_string(d));
}

/// d/2 independent two-expert games: v_{2i-1} + v_{2i} = 1 for every pair.
inline ActionSet make_pair_games_set(std::size_t d, std::size_t cap = ActionSet::kDefaultCap) {
  if (d == 0 || d % 2 != 0) throw DomainError("pair-games set requires a positive even d");
  const std::size_t pairs = d / 2;
  detail::check_cap(std::ldexp(1.0, static_cast<int>(pairs)), cap, "pair-games set");
  std::vector<BinaryVector> out;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << pairs); ++code) {
    BinaryVector v(d, 0);
    for (std::size_t i = 0; i < pairs; ++i) v[2 * i + ((code >> i) & 1U)] = 1;
    out.push_back(std::move(v));
  }
  return ActionSet(d, std::move(out), "pairs:d=" + std::to_string(d));
}

/// Directed graph with named nodes; edge i of `edges` is coordinate i.
struct Dag {
  std::string source = "s";
  std::string sink = "t";
  std::vector<std::pair<std::string, std::string>> edges;
};

/// Reads a graph description: `source <name>`, `sink <name>` and one
/// `<from> <to>` edge per line. `#` starts a comment.
inline Dag read_dag(std::istream& in) {
  Dag dag;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b)) throw DomainError("malformed graph line: '" + line + "'");
    if (a == "source")
      dag.source = b;
    else if (a == "sink")
      dag.sink = b;
    else
      dag.edges.emplace_back(a, b);
  }
  return dag;
}

/// One vertex per source-to-sink path; coordinate i is 1 iff edge i is used.
inline ActionSet make_path_dag(const Dag& dag, std::size_t cap = ActionSet::kDefaultCap) {
  const std::size_t d = dag.edges.size();
  if (d == 0) throw EmptySetError("graph has no edges");
  std::map<std::string, std::vector<std::size_t>> out_edges;
  for (std::size_t i = 0; i < d; ++i) out_edges[dag.edges[i].first].push_back(i);

  // Path counts by memoized DFS; a node seen again while on the stack is a cycle.
  std::map<std::string, double> count;
  std::map<std::string, int> state;
  std::function<double(const std::string&)> paths_from = [&](const std::string& node) -> double {
    if (node == dag.sink) return 1.0;
    if (state[node] == 2) return count[node];
    if (state[node] == 1) throw DomainError("graph contains a cycle through '" + node + "'");
    state[node] = 1;
    double total = 0.0;
    for (auto e : out_edges[node]) total += paths_from(dag.edges[e].second);
    state[node] = 2;
    count[node] = total;
    return total;
  };
  const double total = paths_from(dag.source);
  if (total == 0.0) throw EmptySetError("no path from '" + dag.source + "' to '" + dag.sink + "'");
  detail::check_cap(total, cap, "path set");

  std::vector<BinaryVector> out;
  BinaryVector current(d, 0);
  std::function<void(const std::string&)> walk = [&](const std::string& node) {
    if (node == dag.sink) {
      out.push_back(current);
      return;
    }
    for (auto e : out_edges[node]) {
      if (count.count(dag.edges[e].second) && count[dag.edges[e].second] == 0.0 && dag.edges[e].second != dag.sink)
        continue;
      current[e] = 1;
      walk(dag.edges[e].second);
      current[e] = 0;
    }
  };
  walk(dag.source);
  return ActionSet(d, std::move(out), "paths");
}

/// One binary vector per line, entries separated by whitespace.
inline ActionSet read_explicit_set(std::istream& in, std::string label = "explicit") {
  std::vector<BinaryVector> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    BinaryVector row;
    int x;
    while (ls >> x) {
      if (x != 0 && x != 1) throw DomainError("explicit set entries must be 0 or 1");
      row.push_back(static_cast<std::uint8_t>(x));
    }
    if (!ls.eof()) throw DomainError("malformed explicit set line: '" + line + "'");
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptySetError("explicit set file has no vertices");
  const std::size_t d = rows.front().size();
  return ActionSet(d, std::move(rows), std::move(label));
}

/// Builds a set from `ksubsets:d=8,k=2`, `simplex:d=5`, `exp2lb:d=8`,
/// `pairs:d=8`, `paths:<file>` or `explicit:<file>`.
inline ActionSet parse_action_set(const std::string& text, std::size_t cap = ActionSet::kDefaultCap) {
  const SpecString spec = parse_spec(text);
  auto dim = [&](const char* key) {
    const long v = spec.integer(key);
    if (v <= 0) throw DomainError(std::string("parameter ") + key + " must be positive");
    return static_cast<std::size_t>(v);
  };
  auto open = [&]() {
    if (spec.argument.empty()) throw DomainError("set '" + spec.kind + "' needs a file argument");
    std::ifstream in(spec.argument);
    if (!in) throw DomainError("cannot open '" + spec.argument + "'");
    return in;
  };
  if (spec.kind == "ksubsets") return make_k_subsets(dim("d"), dim("k"), cap);
  if (spec.kind == "simplex") return make_simplex(dim("d"));
  if (spec.kind == "exp2lb") return make_exp2_lowerbound_set(dim("d"), cap);
  if (spec.kind == "pairs") return make_pair_games_set(dim("d"), cap);
  if (spec.kind == "paths") {
    auto in = open();
    return make_path_dag(read_dag(in), cap);
  }
  if (spec.kind == "explicit") {
    auto in = open();
    return read_explicit_set(in, text);
  }
  throw DomainError("unknown action set kind '" + spec.kind + "'");
}

}  // namespace cleb
