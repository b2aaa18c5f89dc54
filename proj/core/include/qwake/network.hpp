#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace qwake {

/// Dense node index in [0, node_count). Distinct from the node's ID.
using Node = std::uint32_t;
/// Port number, 1-based: node v owns ports 1..degree(v).
using Port = std::uint32_t;
/// Node identifier as seen by the distributed algorithm.
using NodeId = std::uint32_t;

struct PortEnd {
  Node node = 0;
  Port port = 0;
  friend auto operator<=>(const PortEnd&, const PortEnd&) = default;
};

/// Undirected edge {u, v}; `pu` is u's port towards v and `pv` is v's port
/// towards u.
struct Edge {
  Node u = 0;
  Node v = 0;
  Port pu = 0;
  Port pv = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Port-numbered undirected graph.
///
/// Each node v owns ports 1..deg(v); `endpoint(v, j)` is the (node, port)
/// pair at the far end of port j. The port map is an involution on
/// (node, port) pairs, the graph is simple, and (unless explicitly waived for
/// degenerate lower-bound instances) connected.
class PortNetwork {
 public:
  PortNetwork() = default;

  /// Validating constructor. `ports[v][j-1]` is the far end of port j of v.
  /// `ids` defaults to v + 1. Throws std::invalid_argument on any violated
  /// invariant.
  static PortNetwork from_port_lists(std::vector<std::vector<PortEnd>> ports,
                                     std::vector<NodeId> ids = {},
                                     bool require_connected = true);

  std::size_t node_count() const noexcept { return ports_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  NodeId id(Node v) const { return ids_.at(v); }
  Node node_with_id(NodeId id) const;
  const std::vector<NodeId>& ids() const noexcept { return ids_; }

  Port degree(Node v) const { return static_cast<Port>(ports_.at(v).size()); }
  Port max_degree() const noexcept;

  /// Far end of port j (1-based) of v.
  PortEnd endpoint(Node v, Port j) const;
  std::span<const PortEnd> ports(Node v) const { return ports_.at(v); }

  bool adjacent(Node v, Node w) const noexcept;
  /// v's port leading to w. Throws std::invalid_argument if not adjacent.
  Port port_to(Node v, Node w) const;

  /// Neighbors of v in port order.
  std::vector<Node> neighbors(Node v) const;

  /// Canonical edge list: u < v, sorted.
  std::vector<Edge> edges() const;

  bool connected() const;

  /// Order-independent digest of topology, ports and IDs.
  std::uint64_t fingerprint() const noexcept;

  friend bool operator==(const PortNetwork& a, const PortNetwork& b) {
    return a.ports_ == b.ports_ && a.ids_ == b.ids_;
  }

 private:
  std::vector<std::vector<PortEnd>> ports_;
  // Per node: (neighbor, port) sorted by neighbor, for port_to lookups.
  std::vector<std::vector<std::pair<Node, Port>>> port_index_;
  std::vector<NodeId> ids_;
  std::vector<Node> by_id_;
  std::size_t edge_count_ = 0;
};

/// Set of initially awake nodes.
class WakeConfig {
 public:
  WakeConfig() = default;
  /// Throws std::invalid_argument if empty or out of range.
  WakeConfig(std::vector<Node> awake, std::size_t node_count);

  static WakeConfig all(std::size_t node_count);

  const std::vector<Node>& awake() const noexcept { return awake_; }
  bool is_awake(Node v) const noexcept;
  std::size_t size() const noexcept { return awake_.size(); }

 private:
  std::vector<Node> awake_;  // sorted, unique
  std::vector<bool> mask_;
};

/// Build from an unported edge list (pairs of node indices). Ports are
/// assigned in increasing neighbor order when `port_seed` is empty, otherwise
/// as a seeded random permutation per node.
PortNetwork build_network(std::size_t node_count, std::span<const std::pair<Node, Node>> edges,
                          std::optional<std::uint64_t> port_seed = std::nullopt);

/// Build from edges carrying explicit port numbers.
PortNetwork build_network(std::size_t node_count, std::span<const Edge> edges,
                          bool require_connected = true);

/// Uniform random spanning tree plus each remaining pair independently with
/// probability `edge_probability`; random ports. Deterministic per seed.
PortNetwork random_connected_graph(std::size_t n, double edge_probability, std::uint64_t seed);

PortNetwork complete_graph(std::size_t n, std::optional<std::uint64_t> port_seed = std::nullopt);
PortNetwork path_graph(std::size_t n);

/// Max over nodes of the BFS distance to the nearest awake node.
std::uint32_t awake_distance(const PortNetwork& network, const WakeConfig& wake);

/// Per-node multi-source BFS distances.
std::vector<std::uint32_t> awake_distances(const PortNetwork& network, const WakeConfig& wake);

/// Fixed-point-free involution on [n] stored 1-based: `partner[i-1]` is the
/// partner of i.
using Matching = std::vector<std::uint32_t>;

/// Uniform random perfect matching via sequential random pairing.
Matching random_perfect_matching(std::size_t n, std::uint64_t seed);

/// Throws std::invalid_argument unless `m` is a fixed-point-free involution.
void validate_matching(std::span<const std::uint32_t> m);

/// Lower-bound instance: a clique C on v_1..v_n whose matched edges are
/// rerouted to pendant nodes w_1..w_n.
///
/// Node layout: v_i is node i-1 with ID i; w_i is node n+i-1 with ID n+i.
struct HiddenMatchingInstance {
  std::size_t n = 0;
  Matching matching;
  PortNetwork clique;   // the pure clique C with port assignment pi_C
  PortNetwork network;  // the realized graph on V and W

  Node v(std::uint32_t i) const noexcept { return i - 1; }
  Node w(std::uint32_t i) const noexcept { return static_cast<Node>(n + i - 1); }
  /// pi_C(i, j): ID of v_i's clique partner behind port j.
  std::uint32_t clique_partner(std::uint32_t i, Port j) const;
  /// Wake set consisting of all center nodes.
  WakeConfig centers_awake() const;
};

HiddenMatchingInstance build_hidden_matching_graph(std::size_t n, Matching matching,
                                                   PortNetwork clique_ports);

/// Text graph format: header `n m`, then m lines `u v pu pv` with 1-based
/// node labels. Nodes get IDs equal to their labels.
void write_graph(std::ostream& out, const PortNetwork& network);
PortNetwork read_graph(std::istream& in);

}  // namespace qwake
