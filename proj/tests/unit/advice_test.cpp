#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "qwake/advice.hpp"
#include "qwake/rng.hpp"

using namespace qwake;

namespace {

std::vector<std::string> all_strings(std::uint32_t length) {
  std::vector<std::string> out{""};
  for (std::uint32_t k = 0; k < length; ++k) {
    std::vector<std::string> next;
    for (const auto& s : out) {
      next.push_back(s + '0');
      next.push_back(s + '1');
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST(Beta, Values) {
  EXPECT_EQ(beta(0), 0);
  EXPECT_EQ(beta(1), 0);
  EXPECT_EQ(beta(2), 0);
  EXPECT_EQ(beta(3), 1);
  EXPECT_EQ(beta(4), 1);
  EXPECT_EQ(beta(5), 2);
  EXPECT_EQ(beta(9), 4);
}

TEST(AdviceTree, DepthIsCeilLog2) {
  EXPECT_EQ(advice_tree_depth(1), 0u);
  EXPECT_EQ(advice_tree_depth(2), 1u);
  EXPECT_EQ(advice_tree_depth(5), 3u);
  EXPECT_EQ(advice_tree_depth(8), 3u);
  EXPECT_EQ(advice_tree_depth(9), 4u);
}

TEST(AdviceTree, HandExamples) {
  EXPECT_EQ(port_range(8, ""), (PortRange{1, 8}));
  EXPECT_EQ(port_range(8, "0"), (PortRange{1, 4}));
  EXPECT_EQ(port_range(8, "101"), (PortRange{6, 6}));
  // Degree 5: leaves 1..5 then 5, 5, 5.
  EXPECT_EQ(port_range(5, "1"), (PortRange{5, 5}));
  EXPECT_EQ(port_range(5, "01"), (PortRange{3, 4}));
  EXPECT_EQ(port_range(1, ""), (PortRange{1, 1}));
}

TEST(AdviceTree, MatchesExplicitTree) {
  for (Port degree = 1; degree <= 40; ++degree) {
    const auto depth = advice_tree_depth(degree);
    for (std::uint32_t len = 0; len <= depth; ++len)
      for (const auto& bits : all_strings(len)) {
        const auto [lo, hi] = oracle::tree_range(degree, bits);
        EXPECT_EQ(port_range(degree, bits), (PortRange{lo, hi})) << degree << ' ' << bits;
      }
  }
}

TEST(AdviceTree, RejectsBadStrings) {
  EXPECT_THROW(port_range(4, "000"), std::invalid_argument);
  EXPECT_THROW(port_range(4, "2"), std::invalid_argument);
  EXPECT_THROW(port_range(0, ""), std::invalid_argument);
  // Padding beyond the depth is ignored when decoding stored advice.
  EXPECT_EQ(advised_range(2, "100"), (PortRange{2, 2}));
}

TEST(AdviceTree, LevelRangeContainsPortAndPrefersLargest) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto net = random_connected_graph(30, 0.3, seed);
    for (Node v = 0; v < net.node_count(); ++v)
      for (Node w : net.neighbors(v))
        for (int b = 0; b <= 6; ++b) {
          const auto lr = level_beta_range(net, v, w, b);
          const Port p = net.port_to(v, w);
          EXPECT_TRUE(lr.range.contains(p));
          EXPECT_EQ(lr.bits.size(), std::min<std::size_t>(b, advice_tree_depth(net.degree(v))));
          // No other path of the same length contains p with a larger range.
          for (const auto& other : all_strings(static_cast<std::uint32_t>(lr.bits.size()))) {
            const auto r = port_range(net.degree(v), other);
            if (r.contains(p)) EXPECT_LE(r.size(), lr.range.size());
          }
        }
  }
}

TEST(EpochPlan, PathFromOneEnd) {
  const auto net = path_graph(5);
  const auto plan = compute_epoch_plan(net, WakeConfig({0}, 5));
  ASSERT_EQ(plan.epochs.size(), 5u);
  EXPECT_EQ(plan.waking_epochs(), 4u);
  for (std::uint32_t i = 0; i < 5; ++i) {
    EXPECT_EQ(plan.epochs[i].actors, std::vector<Node>{i});
    EXPECT_EQ(plan.epoch_of[i], i + 1);
  }
  EXPECT_TRUE(plan.epochs.back().woken.empty());
}

TEST(EpochPlan, LowestIdClaimsSharedSleeper) {
  // Star-like: 0 and 1 awake, both adjacent to 2.
  const std::vector<std::pair<Node, Node>> edges{{0, 1}, {0, 2}, {1, 2}};
  const auto net = build_network(3, edges);
  const auto plan = compute_epoch_plan(net, WakeConfig({0, 1}, 3));
  EXPECT_EQ(plan.share(0).sleepers, std::vector<Node>{2});
  EXPECT_TRUE(plan.share(1).sleepers.empty());
}

TEST(EpochPlan, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 8 + seed % 40;
    const auto net = random_connected_graph(n, 0.1, seed);
    Rng rng(seed);
    const WakeConfig wake({static_cast<Node>(rng.uniform_index(n)), static_cast<Node>(rng.uniform_index(n))},
                          n);
    const auto plan = compute_epoch_plan(net, wake);
    const auto brute = oracle::brute_force_plan(net, wake);
    ASSERT_EQ(plan.epochs.size(), brute.actors.size());
    for (std::size_t i = 0; i < plan.epochs.size(); ++i) {
      const auto& e = plan.epochs[i];
      EXPECT_EQ(std::set<Node>(e.actors.begin(), e.actors.end()), brute.actors[i]);
      EXPECT_EQ(std::set<Node>(e.woken.begin(), e.woken.end()), brute.woken[i]);
      for (const auto& share : e.shares)
        EXPECT_EQ(std::set<Node>(share.sleepers.begin(), share.sleepers.end()),
                  brute.share.at(share.actor));
    }
    EXPECT_EQ(plan.waking_epochs(), awake_distance(net, wake));
  }
}

TEST(Advice, NoAdviceBelowThreeBits) {
  const auto net = complete_graph(10, 1);
  const auto plan = compute_epoch_plan(net, WakeConfig({0}, 10));
  for (int alpha : {0, 1, 2}) {
    const auto a = assign_advice(net, plan, alpha);
    for (const auto& adv : a.advice) EXPECT_EQ(adv, Advice{});
  }
}

TEST(Advice, BudgetAndChainsOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 16 + seed;
    const auto net = random_connected_graph(n, 0.15, seed);
    const auto plan = compute_epoch_plan(net, WakeConfig({0}, n));
    for (int alpha : {3, 5, 7, static_cast<int>(std::log2(n))}) {
      const auto a = assign_advice(net, plan, alpha);
      const int b = beta(alpha);
      for (const auto& adv : a.advice) EXPECT_LE(adv.bit_length(), static_cast<std::size_t>(alpha));
      for (const auto& chain : a.chains) {
        // Ranges are disjoint and together cover the actor's share.
        for (std::size_t x = 0; x < chain.ranges.size(); ++x)
          for (std::size_t y = x + 1; y < chain.ranges.size(); ++y)
            EXPECT_FALSE(chain.ranges[x].overlaps(chain.ranges[y]));
        for (Node u : plan.share(chain.actor).sleepers) {
          const Port p = net.port_to(chain.actor, u);
          EXPECT_TRUE(std::any_of(chain.ranges.begin(), chain.ranges.end(),
                                  [&](const PortRange& r) { return r.contains(p); }));
        }
        EXPECT_LT(plan.share(chain.actor).sleepers.size(), std::size_t{1} << b);
        // Lambda decodes to the first range; each Pi points at the next.
        EXPECT_EQ(advised_range(net.degree(chain.actor), a.advice[chain.actor].lambda),
                  chain.ranges.front());
        for (std::size_t j = 0; j + 1 < chain.members.size(); ++j)
          EXPECT_EQ(advised_range(net.degree(chain.actor), a.advice[chain.members[j]].pi),
                    chain.ranges[j + 1]);
        EXPECT_TRUE(a.advice[chain.members.back()].pi.empty());
      }
    }
  }
}

TEST(Advice, DumpRoundTrip) {
  const auto net = random_connected_graph(40, 0.1, 5);
  const auto plan = compute_epoch_plan(net, WakeConfig({3}, 40));
  const auto a = assign_advice(net, plan, 7);
  std::stringstream buf;
  write_advice(buf, net, a.advice);
  EXPECT_EQ(read_advice(buf, net), a.advice);
  std::stringstream bad("1 x - -\n");
  EXPECT_THROW(read_advice(bad, net), std::invalid_argument);
}
