#pragma once

// Online matching algorithms (RANKING, greedy, random greedy), an offline
// maximum-cardinality solver and exhaustive oracles used to check them.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "onlinematch/instance.hpp"
#include "onlinematch/rng.hpp"

namespace onlinematch {

class Matching {
 public:
  static constexpr std::size_t kUnmatched = std::numeric_limits<std::size_t>::max();

  Matching() = default;
  explicit Matching(std::size_t n_left) : assignment_(n_left, kUnmatched) {}

  std::size_t n_left() const noexcept { return assignment_.size(); }

  std::optional<std::size_t> partner(std::size_t i) const {
    std::size_t j = assignment_.at(i);
    if (j == kUnmatched) return std::nullopt;
    return j;
  }
  bool is_matched(std::size_t i) const { return assignment_.at(i) != kUnmatched; }

  void assign(std::size_t i, std::size_t j) { assignment_.at(i) = j; }

  std::size_t size() const noexcept {
    std::size_t s = 0;
    for (std::size_t j : assignment_) s += (j != kUnmatched);
    return s;
  }

  const std::vector<std::size_t>& assignment() const noexcept { return assignment_; }

  // Injective and every pair is an edge of g.
  bool is_valid_for(const BipartiteInstance& g) const {
    if (n_left() != g.n_left()) return false;
    std::vector<char> used(g.n_right(), 0);
    for (std::size_t i = 0; i < n_left(); ++i) {
      std::size_t j = assignment_[i];
      if (j == kUnmatched) continue;
      if (!g.has_edge(i, j) || used[j]) return false;
      used[j] = 1;
    }
    return true;
  }

  // No edge joins an unmatched buyer to an unmatched item.
  bool is_maximal_for(const BipartiteInstance& g) const {
    std::vector<char> used(g.n_right(), 0);
    for (std::size_t j : assignment_)
      if (j != kUnmatched) used[j] = 1;
    for (std::size_t i = 0; i < n_left(); ++i) {
      if (assignment_[i] != kUnmatched) continue;
      for (std::size_t j : g.neighbors(i))
        if (!used[j]) return false;
    }
    return true;
  }

  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  std::vector<std::size_t> assignment_;
};

namespace detail {

inline void check_sigma(const BipartiteInstance& g, const ArrivalOrder& sigma) {
  if (sigma.size() != g.n_left()) {
    throw std::invalid_argument("arrival order has " + std::to_string(sigma.size()) +
                                " entries, instance has " +
                                std::to_string(g.n_left()) + " buyers");
  }
}

// Shared loop for the online algorithms: `pick(i, available)` returns the
// chosen neighbor of buyer i or kUnmatched.
template <class Pick>
Matching online_match(const BipartiteInstance& g, const ArrivalOrder& sigma,
                      Pick&& pick) {
  Matching m(g.n_left());
  std::vector<char> taken(g.n_right(), 0);
  for (std::size_t i : sigma) {
    std::size_t j = pick(i, taken);
    if (j != Matching::kUnmatched) {
      taken[j] = 1;
      m.assign(i, j);
    }
  }
  return m;
}

}  // namespace detail

// Each arriving buyer takes its available neighbor with the smallest rank.
inline Matching ranking(const BipartiteInstance& g, const RightPermutation& pi,
                        const ArrivalOrder& sigma) {
  if (pi.size() != g.n_right()) {
    throw std::invalid_argument("right permutation size does not match n_right");
  }
  detail::check_sigma(g, sigma);
  return detail::online_match(g, sigma, [&](std::size_t i, const std::vector<char>& taken) {
    std::size_t best = Matching::kUnmatched;
    for (std::size_t j : g.neighbors(i)) {
      if (taken[j]) continue;
      if (best == Matching::kUnmatched || pi[j] < pi[best]) best = j;
    }
    return best;
  });
}

// Lowest-index available neighbor.
inline Matching greedy(const BipartiteInstance& g, const ArrivalOrder& sigma) {
  detail::check_sigma(g, sigma);
  return detail::online_match(g, sigma, [&](std::size_t i, const std::vector<char>& taken) {
    for (std::size_t j : g.neighbors(i))
      if (!taken[j]) return j;
    return Matching::kUnmatched;
  });
}

inline Matching random_greedy(const BipartiteInstance& g, const ArrivalOrder& sigma,
                              std::uint64_t seed) {
  detail::check_sigma(g, sigma);
  Rng rng(seed);
  std::vector<std::size_t> avail;
  return detail::online_match(g, sigma, [&](std::size_t i, const std::vector<char>& taken) {
    avail.clear();
    for (std::size_t j : g.neighbors(i))
      if (!taken[j]) avail.push_back(j);
    if (avail.empty()) return Matching::kUnmatched;
    return avail[uniform_index(rng, avail.size())];
  });
}

// Hopcroft-Karp, O(E sqrt(V)).
inline Matching maximum_matching(const BipartiteInstance& g) {
  constexpr std::size_t kNone = Matching::kUnmatched;
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  const std::size_t nl = g.n_left(), nr = g.n_right();
  std::vector<std::size_t> match_l(nl, kNone), match_r(nr, kNone), dist(nl);

  auto bfs = [&] {
    std::queue<std::size_t> q;
    bool found = false;
    for (std::size_t u = 0; u < nl; ++u) {
      if (match_l[u] == kNone) {
        dist[u] = 0;
        q.push(u);
      } else {
        dist[u] = kInf;
      }
    }
    while (!q.empty()) {
      std::size_t u = q.front();
      q.pop();
      for (std::size_t v : g.neighbors(u)) {
        std::size_t w = match_r[v];
        if (w == kNone) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  };

  // Iterative DFS along the layered graph.
  std::vector<std::size_t> it(nl);
  auto augment = [&](std::size_t root) {
    std::vector<std::size_t> stack{root};
    while (!stack.empty()) {
      std::size_t u = stack.back();
      const auto& adj = g.neighbors(u);
      if (it[u] == adj.size()) {
        dist[u] = kInf;
        stack.pop_back();
        continue;
      }
      std::size_t v = adj[it[u]];
      std::size_t w = match_r[v];
      if (w == kNone) {
        // Flip the path root -> ... -> u -> v.
        for (std::size_t k = stack.size(); k-- > 0;) {
          std::size_t x = stack[k];
          std::size_t y = g.neighbors(x)[it[x]];
          match_r[y] = x;
          match_l[x] = y;
        }
        return true;
      }
      if (dist[w] == dist[u] + 1) {
        stack.push_back(w);
      } else {
        ++it[u];
      }
    }
    return false;
  };

  while (bfs()) {
    std::fill(it.begin(), it.end(), 0);
    for (std::size_t u = 0; u < nl; ++u) {
      if (match_l[u] == kNone) augment(u);
    }
  }

  Matching m(nl);
  for (std::size_t u = 0; u < nl; ++u)
    if (match_l[u] != kNone) m.assign(u, match_l[u]);
  return m;
}

// Exhaustive search over assignments. Limited to n_left <= 10.
inline std::size_t brute_force_max_size(const BipartiteInstance& g) {
  if (g.n_left() > 10) {
    throw std::invalid_argument("brute_force_max_size: n_left must be <= 10");
  }
  std::vector<char> used(g.n_right(), 0);
  std::size_t best = 0;
  auto rec = [&](auto&& self, std::size_t i, std::size_t size) -> void {
    if (size + (g.n_left() - i) <= best) return;
    if (i == g.n_left()) {
      best = size;
      return;
    }
    for (std::size_t j : g.neighbors(i)) {
      if (used[j]) continue;
      used[j] = 1;
      self(self, i + 1, size + 1);
      used[j] = 0;
    }
    self(self, i + 1, size);
  };
  rec(rec, 0, 0);
  return best;
}

struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  friend bool operator==(const Rational&, const Rational&) = default;
};

// Average RANKING size over all n_right! priority orders, as a reduced
// fraction. The sum is at most 8 * 8! so integer arithmetic is exact.
inline Rational exact_ranking_expectation(const BipartiteInstance& g,
                                          const ArrivalOrder& sigma) {
  if (g.n_right() > 8) {
    throw std::invalid_argument("exact_ranking_expectation: n_right must be <= 8");
  }
  detail::check_sigma(g, sigma);
  std::vector<std::size_t> perm(g.n_right());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::uint64_t total = 0, count = 0;
  do {
    total += ranking(g, RightPermutation(perm), sigma).size();
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::uint64_t d = std::gcd(total, count);
  if (d == 0) d = 1;
  return Rational{total / d, count / d};
}

}  // namespace onlinematch
