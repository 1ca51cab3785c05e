#include <gtest/gtest.h>

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "onlinematch/instance.hpp"

using namespace onlinematch;

namespace {

using Adj = std::vector<std::vector<std::size_t>>;

bool invariants_hold(const BipartiteInstance& g) {
  for (const auto& adj : g.adjacency()) {
    for (std::size_t k = 0; k < adj.size(); ++k) {
      if (adj[k] >= g.n_right()) return false;
      if (k > 0 && adj[k - 1] >= adj[k]) return false;
    }
  }
  return true;
}

}  // namespace

TEST(MakeInstance, SingleEdge) {
  auto g = make_instance(1, 1, {{0, 0}});
  EXPECT_EQ(g.adjacency(), (Adj{{0}}));
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(MakeInstance, SortsAndDeduplicates) {
  auto g = make_instance(2, 2, {{0, 1}, {1, 1}, {0, 0}});
  EXPECT_EQ(g.adjacency(), (Adj{{0, 1}, {1}}));

  auto dup = make_instance(2, 3, {{0, 2}, {0, 2}, {1, 0}, {0, 2}});
  EXPECT_EQ(dup.adjacency(), (Adj{{2}, {0}}));
  EXPECT_EQ(dup.edge_count(), 2u);
}

TEST(MakeInstance, RejectsOutOfRange) {
  try {
    make_instance(2, 2, {{0, 2}});
    FAIL() << "expected rejection";
  } catch (const std::out_of_range& e) {
    EXPECT_NE(std::string(e.what()).find("(0,2)"), std::string::npos);
  }
  EXPECT_THROW(make_instance(2, 2, {{2, 0}}), std::out_of_range);
}

TEST(MakeInstance, UnequalSidesAllowed) {
  auto g = make_instance(3, 1, {{0, 0}, {2, 0}});
  EXPECT_EQ(g.n_left(), 3u);
  EXPECT_EQ(g.n_right(), 1u);
  EXPECT_TRUE(g.neighbors(1).empty());
}

TEST(WithoutRight, DropsOnlyThatItem) {
  auto g = kvv_hard_instance(3).without_right(1);
  EXPECT_EQ(g.adjacency(), (Adj{{0, 2}, {2}, {2}}));
  EXPECT_EQ(g.n_right(), 3u);
}

TEST(KvvHardInstance, SmallCases) {
  EXPECT_EQ(kvv_hard_instance(1).adjacency(), (Adj{{0}}));
  EXPECT_EQ(kvv_hard_instance(3).adjacency(), (Adj{{0, 1, 2}, {1, 2}, {2}}));
  EXPECT_THROW(kvv_hard_instance(0), std::invalid_argument);
}

TEST(KvvHardInstance, TriangularEdgeCount) {
  for (std::size_t n = 1; n <= 40; ++n) {
    auto g = kvv_hard_instance(n);
    EXPECT_EQ(g.edge_count(), n * (n + 1) / 2);
    EXPECT_EQ(g.neighbors(n - 1), std::vector<std::size_t>{n - 1});
    EXPECT_TRUE(invariants_hold(g));
  }
}

TEST(RandomBipartite, Extremes) {
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    auto empty = random_bipartite(3, 3, 0.0, seed);
    EXPECT_EQ(empty.edge_count(), 0u);
    auto full = random_bipartite(3, 3, 1.0, seed);
    EXPECT_EQ(full.adjacency(), (Adj{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}));
  }
}

TEST(RandomBipartite, DeterministicGivenSeed) {
  EXPECT_EQ(random_bipartite(50, 50, 0.1, 7), random_bipartite(50, 50, 0.1, 7));
  EXPECT_NE(random_bipartite(50, 50, 0.1, 7), random_bipartite(50, 50, 0.1, 8));
}

TEST(RandomBipartite, RejectsBadProbability) {
  EXPECT_THROW(random_bipartite(2, 2, -0.1, 1), std::invalid_argument);
  EXPECT_THROW(random_bipartite(2, 2, 1.5, 1), std::invalid_argument);
}

TEST(RandomBipartite, InvariantsHold) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto g = random_bipartite(1 + seed % 9, 1 + seed % 7, 0.05 * (seed % 21), seed);
    EXPECT_TRUE(invariants_hold(g));
  }
}

TEST(Serialize, Format) {
  EXPECT_EQ(serialize(kvv_hard_instance(2)), "2 2\n0 0\n0 1\n1 1\n");
  EXPECT_EQ(serialize(make_instance(2, 2, {})), "2 2\n");
}

TEST(Parse, CommentsAndBlankLines) {
  auto g = parse("# header comment\n\n3 2\n  # edge list\n0 1\n\n2 0\r\n0 1\n");
  EXPECT_EQ(g, make_instance(3, 2, {{0, 1}, {2, 0}}));
}

TEST(Parse, ErrorsCarryLineNumbers) {
  try {
    parse("2 2\n0 0\n1 2\n");
    FAIL() << "expected parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse("2 2\n0 x\n");
    FAIL() << "expected parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("2 2\n0 0 0\n"), ParseError);
  EXPECT_THROW(parse("2 2\n-1 0\n"), ParseError);
  EXPECT_THROW(parse("# nothing\n"), ParseError);
}

TEST(Parse, RoundTripFixedCases) {
  for (const auto& g : {kvv_hard_instance(3), make_instance(2, 2, {}), make_instance(0, 0, {})}) {
    EXPECT_EQ(parse(serialize(g)), g);
  }
}

TEST(Parse, RoundTripRandomInstances) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    auto g = random_bipartite(uniform_index(rng, 12), uniform_index(rng, 12), uniform01(rng),
                              rng());
    EXPECT_EQ(parse(serialize(g)), g) << "seed " << seed;
  }
}

TEST(Orders, PermutationValidation) {
  EXPECT_THROW(ArrivalOrder({0, 0}), std::invalid_argument);
  EXPECT_THROW(ArrivalOrder({1, 2}), std::invalid_argument);
  EXPECT_THROW(RightPermutation({0, 2, 2}), std::invalid_argument);
  EXPECT_EQ(ArrivalOrder::reversed(3).order(), (std::vector<std::size_t>{2, 1, 0}));
  EXPECT_EQ(ArrivalOrder::random(20, 5), ArrivalOrder::random(20, 5));
  auto r = ArrivalOrder::random(20, 5).order();
  EXPECT_EQ(std::set<std::size_t>(r.begin(), r.end()).size(), 20u);
}
