#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace oracle {

BrutePlan brute_force_plan(const qwake::PortNetwork& net, const qwake::WakeConfig& wake) {
  BrutePlan plan;
  std::set<Node> prev;
  std::set<Node> cur(wake.awake().begin(), wake.awake().end());
  while (!cur.empty()) {
    std::set<Node> s;
    for (Node v : cur)
      for (Node u : net.neighbors(v))
        if (!cur.contains(u) && !prev.contains(u)) s.insert(u);

    std::vector<Node> ordered(cur.begin(), cur.end());
    std::sort(ordered.begin(), ordered.end(),
              [&](Node a, Node b) { return net.id(a) < net.id(b); });
    std::set<Node> taken;
    for (Node v : ordered) {
      std::set<Node> mine;
      for (Node u : net.neighbors(v))
        if (s.contains(u) && !taken.contains(u)) mine.insert(u);
      taken.insert(mine.begin(), mine.end());
      plan.share[v] = mine;
    }
    plan.actors.push_back(cur);
    plan.woken.push_back(s);
    prev = cur;
    cur = s;
  }
  return plan;
}

std::pair<Port, Port> tree_range(Port degree, const std::string& bits) {
  std::size_t leaves = 1;
  while (leaves < degree) leaves *= 2;
  // Heap-ordered tree: node k has children 2k+1, 2k+2; leaves occupy the
  // last `leaves` slots.
  std::vector<Port> label(2 * leaves - 1, 0);
  for (std::size_t k = 0; k < leaves; ++k)
    label[leaves - 1 + k] = static_cast<Port>(std::min<std::size_t>(k + 1, degree));
  std::size_t node = 0;
  for (char c : bits) {
    node = 2 * node + (c == '1' ? 2 : 1);
    if (node >= label.size()) throw std::invalid_argument("path leaves the tree");
  }
  Port lo = std::numeric_limits<Port>::max(), hi = 0;
  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t k = stack.back();
    stack.pop_back();
    if (k >= leaves - 1) {
      lo = std::min(lo, label[k]);
      hi = std::max(hi, label[k]);
    } else {
      stack.push_back(2 * k + 1);
      stack.push_back(2 * k + 2);
    }
  }
  return {lo, hi};
}

std::uint32_t floyd_awake_distance(const qwake::PortNetwork& net, const qwake::WakeConfig& wake) {
  const std::size_t n = net.node_count();
  constexpr std::uint32_t inf = std::numeric_limits<std::uint32_t>::max() / 4;
  std::vector<std::vector<std::uint32_t>> d(n, std::vector<std::uint32_t>(n, inf));
  for (Node v = 0; v < n; ++v) {
    d[v][v] = 0;
    for (Node u : net.neighbors(v)) d[v][u] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  std::uint32_t worst = 0;
  for (Node v = 0; v < n; ++v) {
    std::uint32_t best = inf;
    for (Node a : wake.awake()) best = std::min(best, d[a][v]);
    worst = std::max(worst, best);
  }
  return worst;
}

qwake::lb::SparseQuantumState direct_route(const qwake::lb::RegisterLayout& layout,
                                           const qwake::lb::SparseQuantumState& state,
                                           const qwake::PortNetwork& realized,
                                           const std::vector<bool>& asleep) {
  using namespace qwake::lb;
  const std::size_t n = layout.n();
  SparseQuantumState out;
  for (const auto& [key, amp] : state.amplitudes) {
    BasisState s = key;
    Amplitude a = amp;
    std::uint32_t t = 0;
    for (Node u = 0; u < layout.nodes(); ++u)
      for (Port j = 1; j <= layout.degree(u); ++j) {
        Token& slot = s[layout.psend(u, j)];
        if (slot == vacuum) continue;
        const Node to = realized.endpoint(u, j).node;
        if (u < n) {
          ++t;
          s[layout.outbox_i(t)] = static_cast<std::int32_t>(u + 1);
          s[layout.outbox_j(t)] = static_cast<std::int32_t>(j);
        }
        s[layout.receive(to, u)] = slot;
        if (!is_classical(slot) && asleep[to]) a = -a;
        slot = vacuum;
      }
    out.amplitudes.emplace(std::move(s), a);
  }
  return out;
}

double chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  return stat;
}

}  // namespace oracle
