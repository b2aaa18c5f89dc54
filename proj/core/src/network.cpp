#include "qwake/network.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qwake/rng.hpp"

namespace qwake {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

std::string at(Node v, Port j) {
  return "(" + std::to_string(v + 1) + "," + std::to_string(j) + ")";
}

}  // namespace

PortNetwork PortNetwork::from_port_lists(std::vector<std::vector<PortEnd>> ports,
                                         std::vector<NodeId> ids, bool require_connected) {
  const std::size_t n = ports.size();
  if (ids.empty()) {
    ids.resize(n);
    std::iota(ids.begin(), ids.end(), NodeId{1});
  }
  if (ids.size() != n) fail("id table size does not match node count");

  PortNetwork net;
  net.by_id_.assign(n, std::numeric_limits<Node>::max());
  for (Node v = 0; v < n; ++v) {
    if (ids[v] < 1 || ids[v] > n) fail("node IDs must be a permutation of [n]");
    if (net.by_id_[ids[v] - 1] != std::numeric_limits<Node>::max()) fail("duplicate node ID");
    net.by_id_[ids[v] - 1] = v;
  }

  std::size_t port_total = 0;
  net.port_index_.resize(n);
  for (Node v = 0; v < n; ++v) {
    const auto& list = ports[v];
    for (Port j = 1; j <= list.size(); ++j) {
      const PortEnd far = list[j - 1];
      if (far.node >= n) fail("port " + at(v, j) + " leads outside the graph");
      if (far.node == v) fail("self-loop at " + at(v, j));
      if (far.port < 1 || far.port > ports[far.node].size())
        fail("port " + at(v, j) + " names a nonexistent far port");
      const PortEnd back = ports[far.node][far.port - 1];
      if (back.node != v || back.port != j)
        fail("port map is not an involution at " + at(v, j));
      net.port_index_[v].emplace_back(far.node, j);
    }
    auto& index = net.port_index_[v];
    std::sort(index.begin(), index.end());
    for (std::size_t k = 1; k < index.size(); ++k)
      if (index[k].first == index[k - 1].first)
        fail("parallel edge between " + std::to_string(v + 1) + " and " +
             std::to_string(index[k].first + 1));
    port_total += list.size();
  }

  net.ports_ = std::move(ports);
  net.ids_ = std::move(ids);
  net.edge_count_ = port_total / 2;
  if (require_connected && !net.connected()) fail("graph is not connected");
  return net;
}

Node PortNetwork::node_with_id(NodeId id) const {
  if (id < 1 || id > by_id_.size()) fail("no node with ID " + std::to_string(id));
  return by_id_[id - 1];
}

Port PortNetwork::max_degree() const noexcept {
  Port best = 0;
  for (const auto& p : ports_) best = std::max<Port>(best, static_cast<Port>(p.size()));
  return best;
}

PortEnd PortNetwork::endpoint(Node v, Port j) const {
  const auto& list = ports_.at(v);
  if (j < 1 || j > list.size()) fail("invalid port " + at(v, j));
  return list[j - 1];
}

bool PortNetwork::adjacent(Node v, Node w) const noexcept {
  if (v >= port_index_.size()) return false;
  const auto& index = port_index_[v];
  auto it = std::lower_bound(index.begin(), index.end(), std::pair<Node, Port>{w, 0});
  return it != index.end() && it->first == w;
}

Port PortNetwork::port_to(Node v, Node w) const {
  const auto& index = port_index_.at(v);
  auto it = std::lower_bound(index.begin(), index.end(), std::pair<Node, Port>{w, 0});
  if (it == index.end() || it->first != w)
    fail("node " + std::to_string(w + 1) + " is not adjacent to " + std::to_string(v + 1));
  return it->second;
}

std::vector<Node> PortNetwork::neighbors(Node v) const {
  std::vector<Node> out;
  out.reserve(ports_.at(v).size());
  for (const auto& e : ports_[v]) out.push_back(e.node);
  return out;
}

std::vector<Edge> PortNetwork::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (Node v = 0; v < ports_.size(); ++v)
    for (Port j = 1; j <= ports_[v].size(); ++j) {
      const PortEnd far = ports_[v][j - 1];
      if (v < far.node) out.push_back({v, far.node, j, far.port});
    }
  std::sort(out.begin(), out.end());
  return out;
}

bool PortNetwork::connected() const {
  if (ports_.empty()) return true;
  std::vector<bool> seen(ports_.size(), false);
  std::vector<Node> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const Node v = stack.back();
    stack.pop_back();
    for (const auto& e : ports_[v])
      if (!seen[e.node]) {
        seen[e.node] = true;
        ++count;
        stack.push_back(e.node);
      }
  }
  return count == ports_.size();
}

std::uint64_t PortNetwork::fingerprint() const noexcept {
  std::uint64_t h = mix_seed(ports_.size());
  for (Node v = 0; v < ports_.size(); ++v) {
    h = combine_seed(h, ids_[v]);
    for (const auto& e : ports_[v]) h = combine_seed(h, (std::uint64_t{e.node} << 32) | e.port);
  }
  return h;
}

WakeConfig::WakeConfig(std::vector<Node> awake, std::size_t node_count) {
  if (awake.empty()) fail("wake set must be nonempty");
  std::sort(awake.begin(), awake.end());
  awake.erase(std::unique(awake.begin(), awake.end()), awake.end());
  if (awake.back() >= node_count) fail("wake set names a node outside the network");
  mask_.assign(node_count, false);
  for (Node v : awake) mask_[v] = true;
  awake_ = std::move(awake);
}

WakeConfig WakeConfig::all(std::size_t node_count) {
  std::vector<Node> nodes(node_count);
  std::iota(nodes.begin(), nodes.end(), Node{0});
  return WakeConfig(std::move(nodes), node_count);
}

bool WakeConfig::is_awake(Node v) const noexcept { return v < mask_.size() && mask_[v]; }

PortNetwork build_network(std::size_t node_count, std::span<const std::pair<Node, Node>> edges,
                          std::optional<std::uint64_t> port_seed) {
  std::vector<std::vector<Node>> adj(node_count);
  for (auto [u, v] : edges) {
    if (u >= node_count || v >= node_count) fail("edge endpoint out of range");
    if (u == v) fail("self-loop at node " + std::to_string(u + 1));
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (Node v = 0; v < node_count; ++v) {
    auto& list = adj[v];
    std::sort(list.begin(), list.end());
    if (std::adjacent_find(list.begin(), list.end()) != list.end())
      fail("duplicate edge at node " + std::to_string(v + 1));
  }
  if (port_seed) {
    Rng rng(*port_seed);
    for (auto& list : adj) std::shuffle(list.begin(), list.end(), rng.engine());
  }
  // port_of[v] maps neighbor -> port, filled lazily via a sorted copy.
  std::vector<std::vector<std::pair<Node, Port>>> port_of(node_count);
  for (Node v = 0; v < node_count; ++v) {
    for (Port j = 1; j <= adj[v].size(); ++j) port_of[v].emplace_back(adj[v][j - 1], j);
    std::sort(port_of[v].begin(), port_of[v].end());
  }
  auto lookup = [&](Node v, Node w) {
    const auto& index = port_of[v];
    return std::lower_bound(index.begin(), index.end(), std::pair<Node, Port>{w, 0})->second;
  };
  std::vector<std::vector<PortEnd>> ports(node_count);
  for (Node v = 0; v < node_count; ++v)
    for (Node w : adj[v]) ports[v].push_back({w, lookup(w, v)});
  return PortNetwork::from_port_lists(std::move(ports));
}

PortNetwork build_network(std::size_t node_count, std::span<const Edge> edges,
                          bool require_connected) {
  std::vector<std::vector<PortEnd>> ports(node_count);
  std::vector<std::vector<bool>> used(node_count);
  auto place = [&](Node v, Port j, PortEnd far) {
    if (j < 1) fail("port numbers start at 1");
    if (ports[v].size() < j) {
      ports[v].resize(j, PortEnd{v, 0});
      used[v].resize(j, false);
    }
    if (used[v][j - 1]) fail("port " + at(v, j) + " assigned twice");
    used[v][j - 1] = true;
    ports[v][j - 1] = far;
  };
  for (const Edge& e : edges) {
    if (e.u >= node_count || e.v >= node_count) fail("edge endpoint out of range");
    if (e.u == e.v) fail("self-loop at node " + std::to_string(e.u + 1));
    place(e.u, e.pu, {e.v, e.pv});
    place(e.v, e.pv, {e.u, e.pu});
  }
  for (Node v = 0; v < node_count; ++v)
    for (Port j = 1; j <= used[v].size(); ++j)
      if (!used[v][j - 1]) fail("port " + at(v, j) + " left unassigned (gap in port numbers)");
  return PortNetwork::from_port_lists(std::move(ports), {}, require_connected);
}

PortNetwork random_connected_graph(std::size_t n, double edge_probability, std::uint64_t seed) {
  if (n < 2) fail("random graphs need at least two nodes");
  if (!(edge_probability >= 0.0 && edge_probability <= 1.0))
    fail("edge probability must lie in [0, 1]");
  Rng rng(seed);

  // Uniform labeled spanning tree from a random Pruefer sequence.
  std::vector<std::pair<Node, Node>> edges;
  edges.reserve(n - 1);
  if (n == 2) {
    edges.emplace_back(0, 1);
  } else {
    std::vector<Node> code(n - 2);
    for (auto& c : code) c = static_cast<Node>(rng.uniform_index(n));
    std::vector<std::uint32_t> degree(n, 1);
    for (Node c : code) ++degree[c];
    // Linear-time decoding.
    Node ptr = 0;
    while (degree[ptr] != 1) ++ptr;
    Node leaf = ptr;
    for (Node c : code) {
      edges.emplace_back(std::min(leaf, c), std::max(leaf, c));
      if (--degree[c] == 1 && c < ptr) {
        leaf = c;
      } else {
        ++ptr;
        while (degree[ptr] != 1) ++ptr;
        leaf = ptr;
      }
    }
    edges.emplace_back(std::min<Node>(leaf, static_cast<Node>(n - 1)),
                       std::max<Node>(leaf, static_cast<Node>(n - 1)));
  }

  std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
  for (auto [u, v] : edges) present[u][v] = true;
  for (Node u = 0; u < n; ++u)
    for (Node v = u + 1; v < n; ++v)
      if (!present[u][v] && rng.bernoulli(edge_probability)) edges.emplace_back(u, v);

  std::sort(edges.begin(), edges.end());
  return build_network(n, edges, rng.engine()());
}

PortNetwork complete_graph(std::size_t n, std::optional<std::uint64_t> port_seed) {
  std::vector<std::pair<Node, Node>> edges;
  for (Node u = 0; u < n; ++u)
    for (Node v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return build_network(n, edges, port_seed);
}

PortNetwork path_graph(std::size_t n) {
  std::vector<std::pair<Node, Node>> edges;
  for (Node u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  return build_network(n, edges);
}

std::vector<std::uint32_t> awake_distances(const PortNetwork& network, const WakeConfig& wake) {
  constexpr auto unreached = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> dist(network.node_count(), unreached);
  std::deque<Node> queue;
  for (Node v : wake.awake()) {
    dist[v] = 0;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const Node v = queue.front();
    queue.pop_front();
    for (const auto& e : network.ports(v))
      if (dist[e.node] == unreached) {
        dist[e.node] = dist[v] + 1;
        queue.push_back(e.node);
      }
  }
  return dist;
}

std::uint32_t awake_distance(const PortNetwork& network, const WakeConfig& wake) {
  const auto dist = awake_distances(network, wake);
  std::uint32_t best = 0;
  for (auto d : dist) {
    if (d == std::numeric_limits<std::uint32_t>::max())
      fail("some node is unreachable from the wake set");
    best = std::max(best, d);
  }
  return best;
}

Matching random_perfect_matching(std::size_t n, std::uint64_t seed) {
  if (n == 0 || n % 2 != 0) fail("perfect matchings need a positive even n");
  Rng rng(seed);
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 1u);
  Matching partner(n, 0);
  // Pair the smallest unmatched element with a uniform choice among the rest.
  std::size_t head = 0;
  while (head < pool.size()) {
    const std::uint32_t a = pool[head];
    const std::size_t pick = head + 1 + rng.uniform_index(pool.size() - head - 1);
    const std::uint32_t b = pool[pick];
    partner[a - 1] = b;
    partner[b - 1] = a;
    std::swap(pool[head + 1], pool[pick]);
    head += 2;
  }
  return partner;
}

void validate_matching(std::span<const std::uint32_t> m) {
  const std::size_t n = m.size();
  if (n % 2 != 0) fail("matching size must be even");
  for (std::uint32_t i = 1; i <= n; ++i) {
    const std::uint32_t k = m[i - 1];
    if (k < 1 || k > n) fail("matching maps outside [n]");
    if (k == i) fail("matching has a fixed point at " + std::to_string(i));
    if (m[k - 1] != i) fail("matching is not an involution at " + std::to_string(i));
  }
}

std::uint32_t HiddenMatchingInstance::clique_partner(std::uint32_t i, Port j) const {
  return clique.id(clique.endpoint(i - 1, j).node);
}

WakeConfig HiddenMatchingInstance::centers_awake() const {
  std::vector<Node> centers(n);
  std::iota(centers.begin(), centers.end(), Node{0});
  return WakeConfig(std::move(centers), 2 * n);
}

HiddenMatchingInstance build_hidden_matching_graph(std::size_t n, Matching matching,
                                                   PortNetwork clique_ports) {
  if (n % 2 != 0) fail("hidden-matching instances need even n");
  if (matching.size() != n) fail("matching size does not match n");
  validate_matching(matching);
  if (clique_ports.node_count() != n || clique_ports.edge_count() != n * (n - 1) / 2)
    fail("clique port assignment must describe K_n");
  for (Node v = 0; v < n; ++v)
    if (clique_ports.id(v) != v + 1) fail("clique node v_i must carry ID i");

  std::vector<std::vector<PortEnd>> ports(2 * n);
  for (Node v = 0; v < n; ++v) {
    ports[v].assign(clique_ports.ports(v).begin(), clique_ports.ports(v).end());
    const Node mate = matching[v] - 1;
    const Port p = clique_ports.port_to(v, mate);
    const Node pendant = static_cast<Node>(n + v);
    ports[v][p - 1] = {pendant, 1};
    ports[pendant] = {{v, p}};
  }
  std::vector<NodeId> ids(2 * n);
  std::iota(ids.begin(), ids.end(), NodeId{1});

  HiddenMatchingInstance inst;
  inst.n = n;
  inst.matching = std::move(matching);
  // H_2 splits into two components; every larger instance is connected.
  inst.network = PortNetwork::from_port_lists(std::move(ports), std::move(ids), n >= 4);
  inst.clique = std::move(clique_ports);
  return inst;
}

void write_graph(std::ostream& out, const PortNetwork& network) {
  const auto edges = network.edges();
  out << network.node_count() << ' ' << edges.size() << '\n';
  for (const Edge& e : edges)
    out << e.u + 1 << ' ' << e.v + 1 << ' ' << e.pu << ' ' << e.pv << '\n';
}

PortNetwork read_graph(std::istream& in) {
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m)) fail("graph file: missing header");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::int64_t u, v, pu, pv;
    if (!(in >> u >> v >> pu >> pv)) fail("graph file: truncated edge list");
    if (u < 1 || v < 1 || u > static_cast<std::int64_t>(n) || v > static_cast<std::int64_t>(n))
      fail("graph file: node label out of range");
    if (pu < 1 || pv < 1) fail("graph file: port numbers start at 1");
    edges.push_back({static_cast<Node>(u - 1), static_cast<Node>(v - 1), static_cast<Port>(pu),
                     static_cast<Port>(pv)});
  }
  return build_network(n, edges);
}

}  // namespace qwake
