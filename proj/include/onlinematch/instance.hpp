#pragma once

// Bipartite instances G = (L, R; E): left vertices are arriving buyers,
// right vertices are items. Indices are 0-based throughout.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "onlinematch/rng.hpp"

namespace onlinematch {

using Edge = std::pair<std::size_t, std::size_t>;

class BipartiteInstance {
 public:
  BipartiteInstance() = default;

  // Builds sorted, duplicate-free adjacency lists. Throws std::out_of_range
  // naming the first offending pair.
  BipartiteInstance(std::size_t n_left, std::size_t n_right,
                    const std::vector<Edge>& edges)
      : n_right_(n_right), adjacency_(n_left) {
    for (const auto& [i, j] : edges) {
      if (i >= n_left || j >= n_right) {
        throw std::out_of_range("edge (" + std::to_string(i) + "," +
                                std::to_string(j) + ") out of range for " +
                                std::to_string(n_left) + "x" +
                                std::to_string(n_right) + " instance");
      }
      adjacency_[i].push_back(j);
    }
    for (auto& adj : adjacency_) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }

  std::size_t n_left() const noexcept { return adjacency_.size(); }
  std::size_t n_right() const noexcept { return n_right_; }

  const std::vector<std::size_t>& neighbors(std::size_t i) const {
    return adjacency_.at(i);
  }
  const std::vector<std::vector<std::size_t>>& adjacency() const noexcept {
    return adjacency_;
  }

  std::size_t edge_count() const noexcept {
    std::size_t m = 0;
    for (const auto& adj : adjacency_) m += adj.size();
    return m;
  }

  bool has_edge(std::size_t i, std::size_t j) const noexcept {
    if (i >= n_left()) return false;
    const auto& adj = adjacency_[i];
    return std::binary_search(adj.begin(), adj.end(), j);
  }

  // Edges in (left, right) lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (std::size_t i = 0; i < n_left(); ++i)
      for (std::size_t j : adjacency_[i]) out.emplace_back(i, j);
    return out;
  }

  // Same index space with every edge incident to item j dropped; models the
  // market in which item j is not offered.
  BipartiteInstance without_right(std::size_t j) const {
    BipartiteInstance out = *this;
    for (auto& adj : out.adjacency_) {
      auto it = std::lower_bound(adj.begin(), adj.end(), j);
      if (it != adj.end() && *it == j) adj.erase(it);
    }
    return out;
  }

  friend bool operator==(const BipartiteInstance&,
                         const BipartiteInstance&) = default;

 private:
  std::size_t n_right_ = 0;
  std::vector<std::vector<std::size_t>> adjacency_;
};

inline BipartiteInstance make_instance(std::size_t n_left, std::size_t n_right,
                                       const std::vector<Edge>& edges) {
  return BipartiteInstance(n_left, n_right, edges);
}

namespace detail {

inline void check_permutation(const std::vector<std::size_t>& v,
                              const char* what) {
  std::vector<char> seen(v.size(), 0);
  for (std::size_t x : v) {
    if (x >= v.size() || seen[x]) {
      throw std::invalid_argument(std::string(what) + " is not a permutation");
    }
    seen[x] = 1;
  }
}

}  // namespace detail

// order[k] is the k-th buyer to arrive.
class ArrivalOrder {
 public:
  explicit ArrivalOrder(std::vector<std::size_t> order)
      : order_(std::move(order)) {
    detail::check_permutation(order_, "arrival order");
  }

  static ArrivalOrder identity(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return ArrivalOrder(std::move(v));
  }
  static ArrivalOrder reversed(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.rbegin(), v.rend(), std::size_t{0});
    return ArrivalOrder(std::move(v));
  }
  static ArrivalOrder random(std::size_t n, std::uint64_t seed) {
    return ArrivalOrder(random_permutation(n, seed));
  }

  std::size_t size() const noexcept { return order_.size(); }
  std::size_t operator[](std::size_t k) const { return order_[k]; }
  const std::vector<std::size_t>& order() const noexcept { return order_; }
  auto begin() const noexcept { return order_.begin(); }
  auto end() const noexcept { return order_.end(); }

  friend bool operator==(const ArrivalOrder&, const ArrivalOrder&) = default;

 private:
  std::vector<std::size_t> order_;
};

// rank[j] is the priority of item j; rank 0 is preferred over everything.
class RightPermutation {
 public:
  explicit RightPermutation(std::vector<std::size_t> rank)
      : rank_(std::move(rank)) {
    detail::check_permutation(rank_, "right permutation");
  }

  static RightPermutation identity(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return RightPermutation(std::move(v));
  }
  static RightPermutation random(std::size_t n, std::uint64_t seed) {
    return RightPermutation(random_permutation(n, seed));
  }

  std::size_t size() const noexcept { return rank_.size(); }
  std::size_t operator[](std::size_t j) const { return rank_[j]; }
  const std::vector<std::size_t>& ranks() const noexcept { return rank_; }

  friend bool operator==(const RightPermutation&,
                         const RightPermutation&) = default;

 private:
  std::vector<std::size_t> rank_;
};

// Upper-triangular adversarial instance: buyer i sees items i..n-1, so the
// last buyer has a single neighbor and the identity matching is perfect.
inline BipartiteInstance kvv_hard_instance(std::size_t n) {
  if (n == 0) throw std::invalid_argument("kvv_hard_instance: n must be >= 1");
  std::vector<Edge> edges;
  edges.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) edges.emplace_back(i, j);
  return BipartiteInstance(n, n, edges);
}

inline BipartiteInstance random_bipartite(std::size_t n_left,
                                          std::size_t n_right,
                                          double edge_prob,
                                          std::uint64_t seed) {
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) {
    throw std::invalid_argument("random_bipartite: edge_prob must be in [0,1]");
  }
  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n_left; ++i)
    for (std::size_t j = 0; j < n_right; ++j)
      if (uniform01(rng) < edge_prob) edges.emplace_back(i, j);
  return BipartiteInstance(n_left, n_right, edges);
}

// Text interchange format: "n_left n_right" header, then one "i j" per
// edge. '#' lines are comments, blank lines are skipped.
inline std::string serialize(const BipartiteInstance& g) {
  std::ostringstream os;
  os << g.n_left() << ' ' << g.n_right() << '\n';
  for (const auto& [i, j] : g.edges()) os << i << ' ' << j << '\n';
  return os.str();
}

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

// Parses exactly two unsigned integers from a line; nothing else allowed.
inline bool parse_pair(std::string_view s, std::size_t& a, std::size_t& b) {
  std::istringstream is{std::string(s)};
  long long x = -1, y = -1;
  if (!(is >> x >> y) || x < 0 || y < 0) return false;
  std::string rest;
  if (is >> rest) return false;
  a = static_cast<std::size_t>(x);
  b = static_cast<std::size_t>(y);
  return true;
}

}  // namespace detail

inline BipartiteInstance parse(std::string_view text) {
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t n_left = 0, n_right = 0;
  std::vector<Edge> edges;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    std::size_t a = 0, b = 0;
    if (!detail::parse_pair(line, a, b)) {
      throw ParseError(line_no, "expected two non-negative integers");
    }
    if (!have_header) {
      n_left = a;
      n_right = b;
      have_header = true;
      continue;
    }
    if (a >= n_left || b >= n_right) {
      throw ParseError(line_no, "edge (" + std::to_string(a) + "," +
                                    std::to_string(b) + ") out of range");
    }
    edges.emplace_back(a, b);
  }
  if (!have_header) throw ParseError(line_no, "missing 'n_left n_right' header");
  return BipartiteInstance(n_left, n_right, edges);
}

}  // namespace onlinematch
