#pragma once

// Experiments around the per-edge guarantee E_w[util_i + rev_j] >= 1 - 1/e:
// counterfactual item removal and the two structural properties behind the
// bound, Monte Carlo estimators, and the uniform-price counterexample on the
// upper-triangular instance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "onlinematch/instance.hpp"
#include "onlinematch/market.hpp"
#include "onlinematch/matchers.hpp"
#include "onlinematch/rng.hpp"
#include "onlinematch/stats.hpp"

namespace onlinematch {

inline constexpr double kFloatSlack = 1e-9;

enum class SigmaKind { Identity, Reversed, Random };

inline std::string_view to_string(SigmaKind k) noexcept {
  switch (k) {
    case SigmaKind::Identity: return "identity";
    case SigmaKind::Reversed: return "reversed";
    case SigmaKind::Random: return "random";
  }
  return "?";
}

inline SigmaKind parse_sigma_kind(std::string_view s) {
  if (s == "identity") return SigmaKind::Identity;
  if (s == "reversed") return SigmaKind::Reversed;
  if (s == "random") return SigmaKind::Random;
  throw std::invalid_argument("unknown arrival order '" + std::string(s) + "'");
}

inline ArrivalOrder make_sigma(SigmaKind kind, std::size_t n, std::uint64_t seed) {
  switch (kind) {
    case SigmaKind::Identity: return ArrivalOrder::identity(n);
    case SigmaKind::Reversed: return ArrivalOrder::reversed(n);
    case SigmaKind::Random: return ArrivalOrder::random(n, seed);
  }
  throw std::invalid_argument("bad SigmaKind");
}

namespace detail {

inline void check_edge(const BipartiteInstance& g, std::size_t i, std::size_t j) {
  if (!g.has_edge(i, j)) {
    throw std::invalid_argument("(" + std::to_string(i) + "," + std::to_string(j) +
                                ") is not an edge of the instance");
  }
}

inline void check_trials(std::uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
}

// Weights of trial t; every estimator draws them the same way, so estimates
// computed separately on the same seed see identical markets.
inline std::vector<double> trial_weights(std::size_t n_right, std::uint64_t seed,
                                         std::uint64_t t) {
  return draw_weights(n_right, derive_seed(seed, t));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Counterfactual removal of item j

struct CounterfactualResult {
  double p = 1.0;              // price of buyer i's item without r_j; 1 if none
  std::optional<double> y;     // p = e^{y-1}; only under the exponential scheme
  bool rj_sold_in_full_market = false;
  double util_i_full = 0.0;
  double p_j = 0.0;            // price of r_j itself
};

inline CounterfactualResult counterfactual(const BipartiteInstance& g,
                                           const ArrivalOrder& sigma,
                                           const PriceAssignment& pa, std::size_t i,
                                           std::size_t j) {
  detail::check_edge(g, i, j);
  CounterfactualResult r;
  r.p_j = pa.price(j);

  const MarketOutcome reduced = run_market(g.without_right(j), pa, sigma);
  if (auto k = reduced.matching.partner(i)) {
    r.p = pa.price(*k);
    if (pa.scheme() == PriceScheme::Exponential) r.y = pa.weight(*k);
  } else {
    r.p = 1.0;
    if (pa.scheme() == PriceScheme::Exponential) r.y = 1.0;
  }

  const MarketOutcome full = run_market(g, pa, sigma);
  r.rj_sold_in_full_market =
      std::binary_search(full.purchased.begin(), full.purchased.end(), j);
  r.util_i_full = full.utils[i];
  return r;
}

struct Claim1Properties {
  bool property1_holds = false;  // r_j sold whenever p_j < p
  bool property2_holds = false;  // util_i >= 1 - p
};

inline Claim1Properties claim1_properties(const CounterfactualResult& c) {
  return {c.p_j >= c.p || c.rj_sold_in_full_market,
          c.util_i_full >= 1.0 - c.p - kFloatSlack};
}

inline Claim1Properties check_claim1_properties(const BipartiteInstance& g,
                                                const ArrivalOrder& sigma,
                                                const PriceAssignment& pa,
                                                std::size_t i, std::size_t j) {
  return claim1_properties(counterfactual(g, sigma, pa, i, j));
}

// Runs the market with and without item j side by side. Before every arrival
// and at the end, the unsold items of the full market must contain those of
// the reduced market and exceed them by at most one. Returns the first
// violating step (0-based arrival index; sigma.size() means "after the last
// arrival"), or nullopt.
inline std::optional<std::size_t> monotone_availability_violation(
    const BipartiteInstance& g, const ArrivalOrder& sigma, const PriceAssignment& pa,
    std::size_t j) {
  if (j >= g.n_right()) throw std::out_of_range("item index out of range");
  detail::check_sigma(g, sigma);
  const BipartiteInstance reduced_g = g.without_right(j);
  MarketState full(g, pa);
  MarketState reduced(reduced_g, pa);

  auto consistent = [&] {
    std::size_t extra = 0;
    for (std::size_t k = 0; k < g.n_right(); ++k) {
      const bool in_full = !full.is_sold(k);
      const bool in_reduced = k != j && !reduced.is_sold(k);
      if (in_reduced && !in_full) return false;
      if (in_full && !in_reduced) ++extra;
    }
    return extra <= 1;
  };

  for (std::size_t step = 0; step < sigma.size(); ++step) {
    if (!consistent()) return step;
    full.arrive(sigma[step]);
    reduced.arrive(sigma[step]);
  }
  if (!consistent()) return sigma.size();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Property sweeps

struct PropertySweep {
  std::uint64_t trials = 0;
  std::uint64_t property1_violations = 0;
  std::uint64_t property2_violations = 0;
  std::uint64_t availability_violations = 0;

  std::uint64_t violations() const noexcept {
    return property1_violations + property2_violations + availability_violations;
  }
  void merge(const PropertySweep& o) noexcept {
    trials += o.trials;
    property1_violations += o.property1_violations;
    property2_violations += o.property2_violations;
    availability_violations += o.availability_violations;
  }
};

inline void record_properties(PropertySweep& acc, const BipartiteInstance& g,
                              const ArrivalOrder& sigma, const PriceAssignment& pa,
                              std::size_t i, std::size_t j) {
  const Claim1Properties p = check_claim1_properties(g, sigma, pa, i, j);
  ++acc.trials;
  acc.property1_violations += !p.property1_holds;
  acc.property2_violations += !p.property2_holds;
  acc.availability_violations += monotone_availability_violation(g, sigma, pa, j).has_value();
}

// Fixed instance; every trial draws weights, an edge uniformly at random and,
// for SigmaKind::Random, a fresh arrival order.
inline PropertySweep property_sweep(const BipartiteInstance& g, SigmaKind sigma_kind,
                                    PriceScheme scheme, std::uint64_t trials,
                                    std::uint64_t seed, unsigned threads = 1) {
  detail::check_trials(trials);
  const auto edges = g.edges();
  if (edges.empty()) throw std::invalid_argument("property sweep needs at least one edge");
  return run_trials(trials, threads, PropertySweep{}, [&](std::uint64_t t, PropertySweep& acc) {
    const std::uint64_t s = derive_seed(seed, t);
    Rng rng(s);
    const PriceAssignment pa(draw_weights(g.n_right(), rng()), scheme);
    const ArrivalOrder sigma = make_sigma(sigma_kind, g.n_left(), rng());
    const auto [i, j] = edges[uniform_index(rng, edges.size())];
    record_properties(acc, g, sigma, pa, i, j);
  });
}

// Random instances with both sides in [1, max_side], random weights, random
// arrival order and a random edge.
inline PropertySweep property_sweep_random(std::uint64_t trials, std::uint64_t seed,
                                           std::size_t max_side = 10,
                                           unsigned threads = 1) {
  detail::check_trials(trials);
  return run_trials(trials, threads, PropertySweep{}, [&](std::uint64_t t, PropertySweep& acc) {
    Rng rng(derive_seed(seed, t));
    BipartiteInstance g;
    do {
      const std::size_t nl = 1 + uniform_index(rng, max_side);
      const std::size_t nr = 1 + uniform_index(rng, max_side);
      const double prob = 0.1 + 0.8 * uniform01(rng);
      g = random_bipartite(nl, nr, prob, rng());
    } while (g.edge_count() == 0);
    const PriceAssignment pa(draw_weights(g.n_right(), rng()), PriceScheme::Exponential);
    const ArrivalOrder sigma = ArrivalOrder::random(g.n_left(), rng());
    const auto edges = g.edges();
    const auto [i, j] = edges[uniform_index(rng, edges.size())];
    record_properties(acc, g, sigma, pa, i, j);
  });
}

// Every point of the weight grid {0, step, ..., 1}^n_right, every arrival
// order and every edge. Only meant for tiny instances.
inline PropertySweep property_grid(const BipartiteInstance& g, double step = 0.1) {
  const auto levels = static_cast<std::size_t>(std::llround(1.0 / step)) + 1;
  const auto edges = g.edges();
  std::vector<std::size_t> digits(g.n_right(), 0);
  std::vector<std::size_t> order(g.n_left());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<ArrivalOrder> sigmas;
  do {
    sigmas.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));

  PropertySweep acc;
  for (;;) {
    std::vector<double> w(g.n_right());
    for (std::size_t k = 0; k < w.size(); ++k)
      w[k] = std::min(1.0, static_cast<double>(digits[k]) * step);
    const PriceAssignment pa(std::move(w), PriceScheme::Exponential);
    for (const auto& sigma : sigmas)
      for (const auto& [i, j] : edges) record_properties(acc, g, sigma, pa, i, j);

    std::size_t k = 0;
    while (k < digits.size() && ++digits[k] == levels) digits[k++] = 0;
    if (k == digits.size()) break;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Per-edge guarantee

inline EstimateWithCI estimate_edge_guarantee(const BipartiteInstance& g,
                                              const ArrivalOrder& sigma, std::size_t i,
                                              std::size_t j, PriceScheme scheme,
                                              std::uint64_t trials, std::uint64_t seed,
                                              double level = kDefaultLevel,
                                              unsigned threads = 1) {
  detail::check_edge(g, i, j);
  detail::check_sigma(g, sigma);
  detail::check_trials(trials);
  const auto acc = run_trials(trials, threads, MeanAccumulator{},
                              [&](std::uint64_t t, MeanAccumulator& a) {
    const PriceAssignment pa(detail::trial_weights(g.n_right(), seed, t), scheme);
    const MarketOutcome out = run_market(g, pa, sigma);
    a.add(out.utils[i] + out.revs[j]);
  });
  return acc.estimate(seed, level);
}

struct EdgeEstimate {
  std::size_t i = 0;
  std::size_t j = 0;
  EstimateWithCI estimate;
};

namespace detail {

struct EdgeAccumulator {
  std::vector<MeanAccumulator> per_edge;
  void merge(const EdgeAccumulator& o) {
    for (std::size_t k = 0; k < per_edge.size(); ++k) per_edge[k].merge(o.per_edge[k]);
  }
};

}  // namespace detail

// estimate_edge_guarantee for every listed edge from a single pass over the
// trials. Each entry equals the corresponding single-edge call bit for bit.
inline std::vector<EdgeEstimate> estimate_edges(const BipartiteInstance& g,
                                                const ArrivalOrder& sigma,
                                                const std::vector<Edge>& edges,
                                                PriceScheme scheme, std::uint64_t trials,
                                                std::uint64_t seed,
                                                double level = kDefaultLevel,
                                                unsigned threads = 1) {
  detail::check_sigma(g, sigma);
  detail::check_trials(trials);
  for (const auto& [i, j] : edges) detail::check_edge(g, i, j);
  const detail::EdgeAccumulator zero{std::vector<MeanAccumulator>(edges.size())};
  const auto acc = run_trials(trials, threads, zero,
                              [&](std::uint64_t t, detail::EdgeAccumulator& a) {
    const PriceAssignment pa(detail::trial_weights(g.n_right(), seed, t), scheme);
    const MarketOutcome out = run_market(g, pa, sigma);
    for (std::size_t k = 0; k < edges.size(); ++k)
      a.per_edge[k].add(out.utils[edges[k].first] + out.revs[edges[k].second]);
  });
  std::vector<EdgeEstimate> result;
  result.reserve(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k)
    result.push_back({edges[k].first, edges[k].second, acc.per_edge[k].estimate(seed, level)});
  return result;
}

// The statistical form of the per-edge bound used throughout: the estimate
// may fall short of 1 - 1/e by at most four half-widths.
inline bool passes_edge_bound(const EstimateWithCI& e) noexcept {
  return e.mean >= kOneMinusInvE - 4.0 * e.half_width;
}

// ---------------------------------------------------------------------------
// Competitive ratio

enum class Algorithm { RankingMarket, RandomGreedy, Greedy };

inline std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::RankingMarket: return "ranking-market";
    case Algorithm::RandomGreedy: return "random-greedy";
    case Algorithm::Greedy: return "greedy";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "ranking-market" || s == "ranking") return Algorithm::RankingMarket;
  if (s == "random-greedy") return Algorithm::RandomGreedy;
  if (s == "greedy") return Algorithm::Greedy;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

struct RatioEstimate {
  EstimateWithCI ratio;     // E[|M|] / |M*|
  std::size_t optimum = 0;  // |M*|
};

inline RatioEstimate estimate_competitive_ratio(const BipartiteInstance& g,
                                                const ArrivalOrder& sigma,
                                                Algorithm algorithm, std::uint64_t trials,
                                                std::uint64_t seed,
                                                double level = kDefaultLevel,
                                                unsigned threads = 1) {
  detail::check_sigma(g, sigma);
  detail::check_trials(trials);
  const std::size_t opt = maximum_matching(g).size();
  if (opt == 0) throw std::invalid_argument("competitive ratio undefined: optimum is 0");
  const double denom = static_cast<double>(opt);
  const auto acc = run_trials(trials, threads, MeanAccumulator{},
                              [&](std::uint64_t t, MeanAccumulator& a) {
    std::size_t size = 0;
    switch (algorithm) {
      case Algorithm::RankingMarket: {
        const PriceAssignment pa(detail::trial_weights(g.n_right(), seed, t),
                                 PriceScheme::Exponential);
        size = run_market(g, pa, sigma).matching.size();
        break;
      }
      case Algorithm::RandomGreedy:
        size = random_greedy(g, sigma, derive_seed(seed, t)).size();
        break;
      case Algorithm::Greedy:
        size = greedy(g, sigma).size();
        break;
    }
    a.add(static_cast<double>(size) / denom);
  });
  return {acc.estimate(seed, level), opt};
}

// Monte Carlo mean of RANKING size under uniformly random priority orders;
// the counterpart of exact_ranking_expectation.
inline EstimateWithCI estimate_ranking_size(const BipartiteInstance& g,
                                            const ArrivalOrder& sigma,
                                            std::uint64_t trials, std::uint64_t seed,
                                            double level = kDefaultLevel,
                                            unsigned threads = 1) {
  detail::check_sigma(g, sigma);
  detail::check_trials(trials);
  const auto acc = run_trials(trials, threads, MeanAccumulator{},
                              [&](std::uint64_t t, MeanAccumulator& a) {
    const RightPermutation pi = RightPermutation::random(g.n_right(), derive_seed(seed, t));
    a.add(static_cast<double>(ranking(g, pi, sigma).size()));
  });
  return acc.estimate(seed, level);
}

// ---------------------------------------------------------------------------
// Welfare chain: E[|M|] >= sum over M* of E[util_i + rev_j] >= (1 - 1/e)|M*|

struct WelfareChain {
  EstimateWithCI lhs;             // E[|M|]
  EstimateWithCI optimal_edges;   // E[sum over (i,j) in M* of util_i + rev_j]
  double rhs = 0.0;               // (1 - 1/e) |M*|
  std::size_t optimum = 0;
  std::uint64_t pointwise_violations = 0;  // trials with edge sum > |M|

  bool first_link_holds() const noexcept { return pointwise_violations == 0; }
  bool second_link_holds() const noexcept {
    return optimal_edges.mean >= rhs - 4.0 * optimal_edges.half_width;
  }
  bool holds() const noexcept {
    return lhs.mean >= rhs - 4.0 * lhs.half_width && first_link_holds() &&
           second_link_holds();
  }
};

namespace detail {

struct ChainAccumulator {
  MeanAccumulator size, edges;
  std::uint64_t violations = 0;
  void merge(const ChainAccumulator& o) noexcept {
    size.merge(o.size);
    edges.merge(o.edges);
    violations += o.violations;
  }
};

}  // namespace detail

inline WelfareChain welfare_lower_bound_check(const BipartiteInstance& g,
                                              const ArrivalOrder& sigma,
                                              std::uint64_t trials, std::uint64_t seed,
                                              double level = kDefaultLevel,
                                              unsigned threads = 1) {
  detail::check_sigma(g, sigma);
  detail::check_trials(trials);
  const Matching opt = maximum_matching(g);
  std::vector<Edge> opt_edges;
  for (std::size_t i = 0; i < g.n_left(); ++i)
    if (auto j = opt.partner(i)) opt_edges.emplace_back(i, *j);

  const auto acc = run_trials(trials, threads, detail::ChainAccumulator{},
                              [&](std::uint64_t t, detail::ChainAccumulator& a) {
    const PriceAssignment pa(detail::trial_weights(g.n_right(), seed, t),
                             PriceScheme::Exponential);
    const MarketOutcome out = run_market(g, pa, sigma);
    const auto size = static_cast<double>(out.matching.size());
    double edge_sum = 0.0;
    for (const auto& [i, j] : opt_edges) edge_sum += out.utils[i] + out.revs[j];
    a.size.add(size);
    a.edges.add(edge_sum);
    a.violations += edge_sum > size + kFloatSlack;
  });

  WelfareChain c;
  c.lhs = acc.size.estimate(seed, level);
  c.optimal_edges = acc.edges.estimate(seed, level);
  c.optimum = opt_edges.size();
  c.rhs = kOneMinusInvE * static_cast<double>(c.optimum);
  c.pointwise_violations = acc.violations;
  return c;
}

// ---------------------------------------------------------------------------
// Uniform prices on the upper-triangular instance

struct Remark3Report {
  std::size_t n = 0;
  EstimateWithCI exponential;        // E[util + rev] on the last buyer's edge
  EstimateWithCI uniform;            // same edge, uniform prices
  EstimateWithCI service;            // P(last buyer gets an item)
  EstimateWithCI last_item_maximal;  // P(last item has the highest price)
  double expected_probability = 0.0; // 1/n
  std::uint64_t served_without_maximal = 0;  // must be 0: maximality is necessary

  // |service - 1/n| in units of the standard error sqrt(q(1-q)/trials), q = 1/n.
  double service_z() const {
    const double q = expected_probability;
    const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(service.trials));
    return std::abs(service.mean - q) / se;
  }
  double maximal_z() const {
    const double q = expected_probability;
    const double se =
        std::sqrt(q * (1.0 - q) / static_cast<double>(last_item_maximal.trials));
    return std::abs(last_item_maximal.mean - q) / se;
  }
};

namespace detail {

struct Remark3Accumulator {
  MeanAccumulator exponential, uniform, service, maximal;
  std::uint64_t served_without_maximal = 0;
  void merge(const Remark3Accumulator& o) noexcept {
    exponential.merge(o.exponential);
    uniform.merge(o.uniform);
    service.merge(o.service);
    maximal.merge(o.maximal);
    served_without_maximal += o.served_without_maximal;
  }
};

}  // namespace detail

// Identity arrival order on kvv_hard_instance(n); the last buyer n-1 has the
// single edge (n-1, n-1). Both schemes see the same weights in every trial.
inline Remark3Report remark3_report(std::size_t n, std::uint64_t trials, std::uint64_t seed,
                                    double level = kDefaultLevel, unsigned threads = 1) {
  if (n < 2) throw std::invalid_argument("remark3_report: n must be >= 2");
  detail::check_trials(trials);
  const BipartiteInstance g = kvv_hard_instance(n);
  const ArrivalOrder sigma = ArrivalOrder::identity(n);
  const std::size_t last = n - 1;

  const auto acc = run_trials(trials, threads, detail::Remark3Accumulator{},
                              [&](std::uint64_t t, detail::Remark3Accumulator& a) {
    std::vector<double> w = detail::trial_weights(n, seed, t);
    const bool maximal =
        std::max_element(w.begin(), w.end()) == w.begin() + static_cast<std::ptrdiff_t>(last);
    const PriceAssignment exp_pa(w, PriceScheme::Exponential);
    const PriceAssignment uni_pa(std::move(w), PriceScheme::Uniform);
    const MarketOutcome e = run_market(g, exp_pa, sigma);
    const MarketOutcome u = run_market(g, uni_pa, sigma);
    const bool served = e.matching.is_matched(last);
    a.exponential.add(e.utils[last] + e.revs[last]);
    a.uniform.add(u.utils[last] + u.revs[last]);
    a.service.add(served ? 1.0 : 0.0);
    a.maximal.add(maximal ? 1.0 : 0.0);
    a.served_without_maximal += served && !maximal;
  });

  Remark3Report r;
  r.n = n;
  r.exponential = acc.exponential.estimate(seed, level);
  r.uniform = acc.uniform.estimate(seed, level);
  r.service = acc.service.estimate(seed, level);
  r.last_item_maximal = acc.maximal.estimate(seed, level);
  r.expected_probability = 1.0 / static_cast<double>(n);
  r.served_without_maximal = acc.served_without_maximal;
  return r;
}

}  // namespace onlinematch
