#pragma once

// Posted-price market view of RANKING. Items carry prices derived from
// random weights; unit-demand buyers with value 1 for each neighbor arrive
// in a given order and buy their cheapest unsold neighbor.

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
#include "onlinematch/matchers.hpp"
#include "onlinematch/rng.hpp"

namespace onlinematch {

enum class PriceScheme { Exponential, Uniform };

inline std::string_view to_string(PriceScheme s) noexcept {
  return s == PriceScheme::Exponential ? "exp" : "uniform";
}

inline PriceScheme parse_scheme(std::string_view s) {
  if (s == "exp" || s == "exponential") return PriceScheme::Exponential;
  if (s == "uniform") return PriceScheme::Uniform;
  throw std::invalid_argument("unknown price scheme '" + std::string(s) + "'");
}

inline double price_of(double weight, PriceScheme scheme) noexcept {
  return scheme == PriceScheme::Exponential ? std::exp(weight - 1.0) : weight;
}

// n independent U[0,1) draws.
inline std::vector<double> draw_weights(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> w(n);
  for (auto& x : w) x = uniform01(rng);
  return w;
}

class PriceAssignment {
 public:
  PriceAssignment(std::vector<double> weights, PriceScheme scheme)
      : weights_(std::move(weights)), scheme_(scheme) {
    prices_.reserve(weights_.size());
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      double w = weights_[j];
      if (!(w >= 0.0 && w <= 1.0)) {
        throw std::invalid_argument("weight " + std::to_string(w) + " of item " +
                                    std::to_string(j) + " outside [0,1]");
      }
      prices_.push_back(price_of(w, scheme_));
    }
  }

  std::size_t size() const noexcept { return prices_.size(); }
  PriceScheme scheme() const noexcept { return scheme_; }
  double weight(std::size_t j) const { return weights_.at(j); }
  double price(std::size_t j) const { return prices_.at(j); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& prices() const noexcept { return prices_; }

 private:
  std::vector<double> weights_;
  std::vector<double> prices_;
  PriceScheme scheme_;
};

inline PriceAssignment prices_from_weights(std::vector<double> weights,
                                           PriceScheme scheme) {
  return PriceAssignment(std::move(weights), scheme);
}

// Incremental market: one arrival at a time. Exposes the set of unsold items
// between arrivals, which the lockstep availability checks rely on.
class MarketState {
 public:
  MarketState(const BipartiteInstance& g, const PriceAssignment& pa)
      : g_(&g), pa_(&pa), sold_(g.n_right(), 0) {
    if (pa.size() != g.n_right()) {
      throw std::invalid_argument("price assignment size does not match n_right");
    }
  }

  // Buyer i buys the cheapest unsold neighbor (lowest index on ties), even
  // at zero utility. Returns the item bought, if any.
  std::optional<std::size_t> arrive(std::size_t i) {
    std::size_t best = Matching::kUnmatched;
    for (std::size_t j : g_->neighbors(i)) {
      if (sold_[j]) continue;
      if (best == Matching::kUnmatched || pa_->price(j) < pa_->price(best)) best = j;
    }
    if (best == Matching::kUnmatched) return std::nullopt;
    sold_[best] = 1;
    return best;
  }

  bool is_sold(std::size_t j) const { return sold_.at(j) != 0; }
  const std::vector<char>& sold() const noexcept { return sold_; }

 private:
  const BipartiteInstance* g_;
  const PriceAssignment* pa_;
  std::vector<char> sold_;
};

struct MarketOutcome {
  Matching matching;
  std::vector<double> utils;            // 1 - p_j for the item bought, else 0
  std::vector<double> revs;             // p_j if sold, else 0
  std::vector<std::size_t> purchased;   // sold items, ascending
};

inline MarketOutcome run_market(const BipartiteInstance& g, const PriceAssignment& pa,
                                const ArrivalOrder& sigma) {
  detail::check_sigma(g, sigma);
  MarketState state(g, pa);
  MarketOutcome out{Matching(g.n_left()), std::vector<double>(g.n_left(), 0.0),
                    std::vector<double>(g.n_right(), 0.0), {}};
  for (std::size_t i : sigma) {
    if (auto j = state.arrive(i)) {
      out.matching.assign(i, *j);
      out.utils[i] = 1.0 - pa.price(*j);
      out.revs[*j] = pa.price(*j);
    }
  }
  for (std::size_t j = 0; j < g.n_right(); ++j)
    if (state.is_sold(j)) out.purchased.push_back(j);
  return out;
}

// Ascending price order; the cheapest item gets rank 0. Ties go to the lower
// index, the same rule MarketState uses.
inline RightPermutation permutation_from_prices(const PriceAssignment& pa) {
  std::vector<std::size_t> order(pa.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pa.price(a) < pa.price(b);
  });
  std::vector<std::size_t> rank(pa.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
  return RightPermutation(std::move(rank));
}

struct WelfareTotals {
  double total_utility = 0.0;
  double total_revenue = 0.0;
  std::size_t matching_size = 0;

  // |sum util + sum rev - |M||
  double residual() const noexcept {
    return std::abs(total_utility + total_revenue - static_cast<double>(matching_size));
  }
};

inline WelfareTotals welfare_decomposition(const MarketOutcome& outcome) {
  WelfareTotals t;
  for (double u : outcome.utils) t.total_utility += u;
  for (double r : outcome.revs) t.total_revenue += r;
  t.matching_size = outcome.matching.size();
  return t;
}

}  // namespace onlinematch
