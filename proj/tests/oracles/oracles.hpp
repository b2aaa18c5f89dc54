#pragma once

// Independent reference implementations used only by tests. Each one follows
// the textbook definition as literally as possible and ignores speed.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qwake/lowerbound.hpp"
#include "qwake/network.hpp"

namespace oracle {

using qwake::Node;
using qwake::Port;

/// A_i, S_i and the per-actor shares from set algebra over neighbor sets.
struct BrutePlan {
  std::vector<std::set<Node>> actors;   // A_1, A_2, ...
  std::vector<std::set<Node>> woken;    // S_1, S_2, ...
  std::map<Node, std::set<Node>> share; // S_v for each actor v
};

BrutePlan brute_force_plan(const qwake::PortNetwork& net, const qwake::WakeConfig& wake);

/// Explicit complete binary tree over ports 1..degree with padded leaves;
/// returns the smallest and largest leaf label under the path `bits`.
std::pair<Port, Port> tree_range(Port degree, const std::string& bits);

/// All-pairs shortest paths (Floyd-Warshall), then max over nodes of the
/// distance to the nearest awake node.
std::uint32_t floyd_awake_distance(const qwake::PortNetwork& net, const qwake::WakeConfig& wake);

/// Routes one round by reading the matching openly: each non-vacuum
/// port-send goes straight to the realized neighbor. Reproduces the
/// (node ID, port) outbox bookkeeping so whole states can be compared.
qwake::lb::SparseQuantumState direct_route(const qwake::lb::RegisterLayout& layout,
                                           const qwake::lb::SparseQuantumState& state,
                                           const qwake::PortNetwork& realized,
                                           const std::vector<bool>& asleep);

/// Pearson chi-square statistic of observed counts against a uniform
/// expectation.
double chi_square_uniform(const std::vector<std::uint64_t>& counts);

}  // namespace oracle
