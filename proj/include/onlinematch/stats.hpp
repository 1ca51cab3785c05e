#pragma once

// Monte Carlo plumbing: normal-approximation confidence intervals and a
// trial runner whose result does not depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace onlinematch {

inline constexpr double kDefaultLevel = 0.999;
inline constexpr double kOneMinusInvE = 0.63212055882855767840;  // 1 - 1/e

// Two-sided normal critical value, e.g. 3.2905 for level 0.999.
inline double z_for_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level must be in (0,1)");
  }
  boost::math::normal_distribution<double> n01;
  return boost::math::quantile(n01, 0.5 + level / 2.0);
}

struct EstimateWithCI {
  double mean = 0.0;
  double half_width = 0.0;  // z * s / sqrt(trials)
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double level = kDefaultLevel;

  double std_error() const {
    return half_width == 0.0 ? 0.0 : half_width / z_for_level(level);
  }
  double lower() const noexcept { return mean - half_width; }
  double upper() const noexcept { return mean + half_width; }
};

struct MeanAccumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t count = 0;

  void add(double x) noexcept {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  void merge(const MeanAccumulator& o) noexcept {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }

  EstimateWithCI estimate(std::uint64_t seed, double level) const {
    if (count == 0) throw std::logic_error("estimate of an empty sample");
    EstimateWithCI e;
    e.trials = count;
    e.seed = seed;
    e.level = level;
    const double n = static_cast<double>(count);
    e.mean = sum / n;
    if (count > 1) {
      double var = (sum_sq - n * e.mean * e.mean) / (n - 1.0);
      var = std::max(var, 0.0);
      e.half_width = z_for_level(level) * std::sqrt(var / n);
    }
    return e;
  }
};

inline constexpr std::uint64_t kTrialBlock = 1024;

// Runs trial(t, acc) for t in [0, trials). Trials are summed inside fixed
// blocks of kTrialBlock and the blocks are merged in index order, so any
// thread count yields bit-identical accumulators. `zero` must be an empty
// accumulator; Acc needs merge(const Acc&).
template <class Acc, class TrialFn>
Acc run_trials(std::uint64_t trials, unsigned threads, const Acc& zero, TrialFn&& trial) {
  const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<Acc> partial(blocks, zero);
  auto do_block = [&](std::uint64_t b) {
    const std::uint64_t lo = b * kTrialBlock;
    const std::uint64_t hi = std::min(trials, lo + kTrialBlock);
    for (std::uint64_t t = lo; t < hi; ++t) trial(t, partial[b]);
  };

  threads = std::max(1u, threads);
  if (threads == 1 || blocks <= 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) do_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
      for (std::uint64_t b; (b = next.fetch_add(1)) < blocks;) do_block(b);
    };
    std::vector<std::thread> pool;
    const auto n = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Acc total = zero;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace onlinematch
