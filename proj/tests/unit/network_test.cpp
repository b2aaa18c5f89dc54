#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "oracles.hpp"
#include "qwake/network.hpp"
#include "qwake/rng.hpp"

using namespace qwake;

TEST(PortNetwork, TwoNodePath) {
  const auto net = path_graph(2);
  EXPECT_EQ(net.node_count(), 2u);
  EXPECT_EQ(net.edge_count(), 1u);
  EXPECT_EQ(net.endpoint(0, 1), (PortEnd{1, 1}));
  EXPECT_EQ(net.endpoint(1, 1), (PortEnd{0, 1}));
}

TEST(PortNetwork, PortMapIsAnInvolution) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto net = random_connected_graph(30, 0.2, seed);
    for (Node v = 0; v < net.node_count(); ++v)
      for (Port j = 1; j <= net.degree(v); ++j) {
        const PortEnd far = net.endpoint(v, j);
        EXPECT_EQ(net.endpoint(far.node, far.port), (PortEnd{v, j}));
        EXPECT_EQ(net.port_to(v, far.node), j);
      }
  }
}

TEST(PortNetwork, RejectsBrokenPortMaps) {
  // Port 1 of node 0 points at node 1 port 1, which points back elsewhere.
  std::vector<std::vector<PortEnd>> ports{{{1, 1}}, {{2, 1}}, {{1, 1}}};
  EXPECT_THROW(PortNetwork::from_port_lists(ports), std::invalid_argument);
  // Self-loop.
  EXPECT_THROW(PortNetwork::from_port_lists({{{0, 1}}}), std::invalid_argument);
  // Parallel edges.
  EXPECT_THROW(PortNetwork::from_port_lists({{{1, 1}, {1, 2}}, {{0, 1}, {0, 2}}}),
               std::invalid_argument);
  // Disconnected.
  EXPECT_THROW(PortNetwork::from_port_lists({{{1, 1}}, {{0, 1}}, {{3, 1}}, {{2, 1}}}),
               std::invalid_argument);
  EXPECT_NO_THROW(PortNetwork::from_port_lists({{{1, 1}}, {{0, 1}}, {{3, 1}}, {{2, 1}}}, {}, false));
  // IDs must be a permutation of [n].
  EXPECT_THROW(PortNetwork::from_port_lists({{{1, 1}}, {{0, 1}}}, {1, 1}), std::invalid_argument);
}

TEST(PortNetwork, ExplicitPortsDetectGaps) {
  const std::vector<Edge> gap{{0, 1, 2, 1}};
  EXPECT_THROW(build_network(2, std::span<const Edge>(gap)), std::invalid_argument);
  const std::vector<Edge> twice{{0, 1, 1, 1}, {0, 2, 1, 1}};
  EXPECT_THROW(build_network(3, std::span<const Edge>(twice)), std::invalid_argument);
}

TEST(PortNetwork, CompleteGraphShape) {
  const auto net = complete_graph(9, 4);
  EXPECT_EQ(net.edge_count(), 36u);
  for (Node v = 0; v < 9; ++v) EXPECT_EQ(net.degree(v), 8u);
  EXPECT_TRUE(net.connected());
}

TEST(PortNetwork, RandomGraphsAreDeterministicAndConnected) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = random_connected_graph(40, 0.05, seed);
    const auto b = random_connected_graph(40, 0.05, seed);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
    EXPECT_TRUE(a.connected());
    EXPECT_GE(a.edge_count(), 39u);
  }
  EXPECT_NE(random_connected_graph(40, 0.05, 1).fingerprint(),
            random_connected_graph(40, 0.05, 2).fingerprint());
}

TEST(PortNetwork, TreeOnlyWhenProbabilityIsZero) {
  const auto net = random_connected_graph(25, 0.0, 3);
  EXPECT_EQ(net.edge_count(), 24u);
}

TEST(PortNetwork, GraphFileRoundTrip) {
  const auto net = random_connected_graph(17, 0.3, 11);
  std::stringstream buf;
  write_graph(buf, net);
  const auto back = read_graph(buf);
  EXPECT_EQ(back.edges(), net.edges());
  EXPECT_EQ(back.fingerprint(), net.fingerprint());
}

TEST(PortNetwork, ReadGraphRejectsGarbage) {
  std::stringstream bad("3 2\n1 2 1 1\n2 9 2 1\n");
  EXPECT_THROW(read_graph(bad), std::invalid_argument);
  std::stringstream truncated("3 2\n1 2 1 1\n");
  EXPECT_THROW(read_graph(truncated), std::invalid_argument);
}

TEST(AwakeDistance, PathFromOneEnd) {
  const auto net = path_graph(7);
  EXPECT_EQ(awake_distance(net, WakeConfig({0}, 7)), 6u);
  EXPECT_EQ(awake_distance(net, WakeConfig({3}, 7)), 3u);
  EXPECT_EQ(awake_distance(net, WakeConfig({0, 6}, 7)), 3u);
  EXPECT_EQ(awake_distance(net, WakeConfig::all(7)), 0u);
}

TEST(AwakeDistance, MatchesFloydWarshall) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto net = random_connected_graph(24, 0.08, seed);
    Rng rng(seed);
    std::vector<Node> awake{static_cast<Node>(rng.uniform_index(24)),
                            static_cast<Node>(rng.uniform_index(24))};
    const WakeConfig wake(awake, 24);
    EXPECT_EQ(awake_distance(net, wake), oracle::floyd_awake_distance(net, wake));
  }
}

TEST(WakeConfig, Validation) {
  EXPECT_THROW(WakeConfig({}, 4), std::invalid_argument);
  EXPECT_THROW(WakeConfig({4}, 4), std::invalid_argument);
  const WakeConfig w({2, 0, 2}, 4);
  EXPECT_EQ(w.size(), 2u);
  EXPECT_TRUE(w.is_awake(0));
  EXPECT_FALSE(w.is_awake(1));
}

TEST(Matching, RandomMatchingsAreInvolutions) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto m = random_perfect_matching(10, seed);
    EXPECT_NO_THROW(validate_matching(m));
  }
  EXPECT_THROW(random_perfect_matching(5, 0), std::invalid_argument);
  const Matching fixed{1, 2};
  EXPECT_THROW(validate_matching(fixed), std::invalid_argument);
  const Matching not_inv{2, 3, 1};
  EXPECT_THROW(validate_matching(not_inv), std::invalid_argument);
}

TEST(Matching, UniformOverAllMatchingsOfSix) {
  // 15 perfect matchings of [6]; chi-square with 14 degrees of freedom.
  std::map<Matching, std::uint64_t> counts;
  const int trials = 30000;
  for (int s = 0; s < trials; ++s) ++counts[random_perfect_matching(6, 1000 + s)];
  ASSERT_EQ(counts.size(), 15u);
  std::vector<std::uint64_t> c;
  for (const auto& [m, k] : counts) c.push_back(k);
  // 99.9th percentile of chi-square(14) is about 36.1.
  EXPECT_LT(oracle::chi_square_uniform(c), 36.1);
}

TEST(HiddenMatching, StructureOfHn) {
  const Matching m{3, 4, 1, 2};
  const auto inst = build_hidden_matching_graph(4, m, complete_graph(4, 9));
  const auto& g = inst.network;
  EXPECT_EQ(g.node_count(), 8u);
  EXPECT_TRUE(g.connected());
  for (std::uint32_t i = 1; i <= 4; ++i) {
    EXPECT_EQ(g.degree(inst.v(i)), 3u);
    EXPECT_EQ(g.degree(inst.w(i)), 1u);
    EXPECT_TRUE(g.adjacent(inst.v(i), inst.w(i)));
    EXPECT_FALSE(g.adjacent(inst.v(i), inst.v(m[i - 1])));
    EXPECT_EQ(g.id(inst.w(i)), 4 + i);
    // The pendant edge reuses the port that led to the matched partner.
    EXPECT_EQ(g.port_to(inst.v(i), inst.w(i)), inst.clique.port_to(inst.v(i), inst.v(m[i - 1])));
  }
  EXPECT_EQ(inst.centers_awake().size(), 4u);
}

TEST(HiddenMatching, DegenerateTwo) {
  const auto inst = build_hidden_matching_graph(2, {2, 1}, complete_graph(2));
  EXPECT_EQ(inst.network.edge_count(), 2u);
  EXPECT_FALSE(inst.network.connected());
}

TEST(HiddenMatching, RejectsOddAndBadInput) {
  EXPECT_THROW(build_hidden_matching_graph(3, {2, 1, 3}, complete_graph(3)), std::invalid_argument);
  EXPECT_THROW(build_hidden_matching_graph(4, {2, 1, 4, 3}, complete_graph(5)),
               std::invalid_argument);
}
