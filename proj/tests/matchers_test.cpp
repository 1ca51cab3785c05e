#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "onlinematch/analysis.hpp"
#include "onlinematch/instance.hpp"
#include "onlinematch/matchers.hpp"

using namespace onlinematch;

namespace {

// [[0,1],[0]]: greedy with index tie-break matches only one buyer.
BipartiteInstance two_by_two_exhibit() { return make_instance(2, 2, {{0, 0}, {0, 1}, {1, 0}}); }

BipartiteInstance random_small(Rng& rng, std::size_t max_side) {
  const std::size_t nl = uniform_index(rng, max_side + 1);
  const std::size_t nr = uniform_index(rng, max_side + 1);
  return random_bipartite(nl, nr, uniform01(rng), rng());
}

}  // namespace

TEST(Ranking, KvvTwoByHand) {
  const auto g = kvv_hard_instance(2);
  const auto id = ArrivalOrder::identity(2);

  auto m = ranking(g, RightPermutation({0, 1}), id);
  EXPECT_EQ(m.partner(0), 0u);
  EXPECT_EQ(m.partner(1), 1u);
  EXPECT_EQ(m.size(), 2u);

  m = ranking(g, RightPermutation({1, 0}), id);
  EXPECT_EQ(m.partner(0), 1u);
  EXPECT_FALSE(m.partner(1).has_value());
  EXPECT_EQ(m.size(), 1u);
}

TEST(Ranking, NoEdges) {
  const auto g = make_instance(3, 4, {});
  EXPECT_EQ(ranking(g, RightPermutation::identity(4), ArrivalOrder::identity(3)).size(), 0u);
}

TEST(Ranking, SizeMismatchRejected) {
  const auto g = kvv_hard_instance(3);
  EXPECT_THROW(ranking(g, RightPermutation::identity(2), ArrivalOrder::identity(3)),
               std::invalid_argument);
  EXPECT_THROW(ranking(g, RightPermutation::identity(3), ArrivalOrder::identity(4)),
               std::invalid_argument);
}

// Relabeling items together with their ranks leaves the matching size alone.
TEST(Ranking, PermutationEquivariance) {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = random_small(rng, 9);
    const auto pi = RightPermutation::random(g.n_right(), rng());
    const auto sigma = ArrivalOrder::random(g.n_left(), rng());
    const auto relabel = random_permutation(g.n_right(), rng());

    std::vector<Edge> edges;
    for (const auto& [i, j] : g.edges()) edges.emplace_back(i, relabel[j]);
    const auto h = make_instance(g.n_left(), g.n_right(), edges);
    std::vector<std::size_t> rank(g.n_right());
    for (std::size_t j = 0; j < g.n_right(); ++j) rank[relabel[j]] = pi[j];

    const auto a = ranking(g, pi, sigma);
    const auto b = ranking(h, RightPermutation(rank), sigma);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < g.n_left(); ++i) {
      ASSERT_EQ(a.is_matched(i), b.is_matched(i));
      if (a.is_matched(i)) {
        ASSERT_EQ(relabel[*a.partner(i)], *b.partner(i));
      }
    }
  }
}

TEST(Greedy, ExhibitsHalf) {
  const auto g = two_by_two_exhibit();
  const auto m = greedy(g, ArrivalOrder::identity(2));
  EXPECT_EQ(m.partner(0), 0u);
  EXPECT_FALSE(m.is_matched(1));
  EXPECT_EQ(m.size(), 1u);
  EXPECT_EQ(brute_force_max_size(g), 2u);
}

TEST(Greedy, KvvThreeIdentity) {
  const auto m = greedy(kvv_hard_instance(3), ArrivalOrder::identity(3));
  EXPECT_EQ(m.assignment(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Greedy, NoEdges) {
  EXPECT_EQ(greedy(make_instance(2, 2, {}), ArrivalOrder::identity(2)).size(), 0u);
}

TEST(RandomGreedy, ForcedChoiceAndEmpty) {
  const auto single = make_instance(1, 1, {{0, 0}});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_EQ(random_greedy(single, ArrivalOrder::identity(1), seed).partner(0), 0u);
  }
  EXPECT_EQ(random_greedy(make_instance(2, 3, {}), ArrivalOrder::identity(2), 3).size(), 0u);
}

TEST(RandomGreedy, ExhibitSucceedsWithProbabilityHalf) {
  // Exactly 1/2: buyer 0 picks r_1 or r_2 with equal probability and only
  // r_2 leaves room for buyer 1.
  const auto g = two_by_two_exhibit();
  const std::uint64_t trials = 40000;
  std::uint64_t perfect = 0;
  for (std::uint64_t t = 0; t < trials; ++t)
    perfect += random_greedy(g, ArrivalOrder::identity(2), derive_seed(77, t)).size() == 2;
  const double p = static_cast<double>(perfect) / trials;
  const double se = std::sqrt(0.25 / trials);
  EXPECT_NEAR(p, 0.5, 4 * se);
}

TEST(OnlineMatchers, ValidMaximalAndHalfOptimal) {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = random_small(rng, 12);
    const auto sigma = ArrivalOrder::random(g.n_left(), rng());
    const std::size_t opt = maximum_matching(g).size();
    const auto m1 = greedy(g, sigma);
    const auto m2 = random_greedy(g, sigma, rng());
    const auto m3 = ranking(g, RightPermutation::random(g.n_right(), rng()), sigma);
    for (const auto* m : {&m1, &m2, &m3}) {
      ASSERT_TRUE(m->is_valid_for(g));
      ASSERT_TRUE(m->is_maximal_for(g));
      ASSERT_GE(2 * m->size(), opt);
      ASSERT_LE(m->size(), opt);
    }
  }
}

TEST(RandomGreedy, DeterministicGivenSeed) {
  const auto g = random_bipartite(30, 30, 0.2, 5);
  const auto sigma = ArrivalOrder::identity(30);
  EXPECT_EQ(random_greedy(g, sigma, 9), random_greedy(g, sigma, 9));
}

TEST(MaximumMatching, KnownCases) {
  for (std::size_t n = 1; n <= 30; ++n) EXPECT_EQ(maximum_matching(kvv_hard_instance(n)).size(), n);
  EXPECT_EQ(maximum_matching(two_by_two_exhibit()).size(), 2u);
  EXPECT_EQ(maximum_matching(make_instance(3, 3, {})).size(), 0u);
  EXPECT_EQ(maximum_matching(make_instance(0, 5, {})).size(), 0u);
}

TEST(MaximumMatching, AgreesWithBruteForce) {
  Rng rng(8);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto g = random_small(rng, 8);
    const auto m = maximum_matching(g);
    ASSERT_TRUE(m.is_valid_for(g));
    ASSERT_EQ(m.size(), brute_force_max_size(g)) << serialize(g);
  }
}

TEST(MaximumMatching, LargeRandomIsValid) {
  const auto g = random_bipartite(400, 300, 0.01, 4);
  const auto m = maximum_matching(g);
  EXPECT_TRUE(m.is_valid_for(g));
  EXPECT_TRUE(m.is_maximal_for(g));
}

TEST(BruteForce, Cases) {
  EXPECT_EQ(brute_force_max_size(kvv_hard_instance(4)), 4u);
  std::vector<Edge> complete;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) complete.emplace_back(i, j);
  EXPECT_EQ(brute_force_max_size(make_instance(3, 2, complete)), 2u);
  EXPECT_EQ(brute_force_max_size(make_instance(3, 3, {})), 0u);
  EXPECT_THROW(brute_force_max_size(kvv_hard_instance(11)), std::invalid_argument);
}

TEST(ExactRankingExpectation, SmallCases) {
  EXPECT_EQ(exact_ranking_expectation(kvv_hard_instance(2), ArrivalOrder::identity(2)),
            (Rational{3, 2}));
  EXPECT_EQ(exact_ranking_expectation(make_instance(1, 1, {{0, 0}}), ArrivalOrder::identity(1)),
            (Rational{1, 1}));
  EXPECT_EQ(exact_ranking_expectation(make_instance(2, 2, {}), ArrivalOrder::identity(2)),
            (Rational{0, 1}));
  EXPECT_THROW(exact_ranking_expectation(kvv_hard_instance(9), ArrivalOrder::identity(9)),
               std::invalid_argument);
}

// Values from an independent enumeration script over all n! priority orders
// on the upper-triangular instance with identity arrivals.
TEST(ExactRankingExpectation, KvvFrozenValues) {
  const std::vector<Rational> expected = {{3, 2},       {13, 6},       {67, 24},    {137, 40},
                                          {2921, 720}, {23633, 5040}, {23839, 4480}};
  double previous = 1.0;
  for (std::size_t n = 2; n <= 8; ++n) {
    const Rational r = exact_ranking_expectation(kvv_hard_instance(n), ArrivalOrder::identity(n));
    EXPECT_EQ(r, expected[n - 2]) << "n=" << n;
    const double normalized = r.value() / static_cast<double>(n);
    EXPECT_LT(normalized, previous);
    EXPECT_GT(normalized, kOneMinusInvE);
    previous = normalized;
  }
}

TEST(ExactRankingExpectation, MatchesMonteCarlo) {
  Rng rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const auto g = random_bipartite(2 + uniform_index(rng, 6), 2 + uniform_index(rng, 6), 0.5, rng());
    const auto sigma = ArrivalOrder::random(g.n_left(), rng());
    const double exact = exact_ranking_expectation(g, sigma).value();
    const auto mc = estimate_ranking_size(g, sigma, 20000, rng());
    EXPECT_LE(std::abs(mc.mean - exact), 4 * mc.std_error() + 1e-12);
  }
}
