#include "qwake/advice.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qwake/rng.hpp"

namespace qwake {

namespace {

std::string pad_to(std::string bits, int width) {
  if (static_cast<int>(bits.size()) < width) bits.append(width - bits.size(), '0');
  return bits;
}

bool at_least_pow2(std::size_t value, int exponent) {
  if (exponent >= 63) return false;
  return value >= (std::size_t{1} << exponent);
}

void sort_by_id(const PortNetwork& net, std::vector<Node>& nodes) {
  std::sort(nodes.begin(), nodes.end(),
            [&](Node a, Node b) { return net.id(a) < net.id(b); });
}

}  // namespace

int beta(int alpha) { return std::max((alpha - 1) / 2, 0); }

std::uint32_t advice_tree_depth(Port degree) {
  std::uint32_t depth = 0;
  while ((Port{1} << depth) < degree) ++depth;
  return depth;
}

PortRange port_range(Port degree, std::string_view bits) {
  if (degree < 1) throw std::invalid_argument("port_range: degree must be positive");
  const std::uint32_t depth = advice_tree_depth(degree);
  if (bits.size() > depth)
    throw std::invalid_argument("port_range: bit string longer than the advice tree depth");
  std::uint64_t prefix = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("port_range: bits must be 0 or 1");
    prefix = (prefix << 1) | static_cast<std::uint64_t>(c == '1');
  }
  const std::uint64_t width = std::uint64_t{1} << (depth - bits.size());
  const std::uint64_t raw_lo = prefix * width + 1;
  const std::uint64_t raw_hi = (prefix + 1) * width;
  return {static_cast<Port>(std::min<std::uint64_t>(raw_lo, degree)),
          static_cast<Port>(std::min<std::uint64_t>(raw_hi, degree))};
}

PortRange advised_range(Port degree, std::string_view bits) {
  const std::uint32_t depth = advice_tree_depth(degree);
  return port_range(degree, bits.substr(0, std::min<std::size_t>(bits.size(), depth)));
}

LevelRange level_beta_range(const PortNetwork& network, Node v, Node w, int beta) {
  const Port p = network.port_to(v, w);
  const Port degree = network.degree(v);
  const std::uint32_t depth = advice_tree_depth(degree);
  const std::uint32_t level = std::min<std::uint32_t>(static_cast<std::uint32_t>(std::max(beta, 0)), depth);
  // Leaf p-1 (0-based) sits under prefix (p-1) >> (depth - level). For
  // p = degree this is the leftmost candidate, whose range is the largest;
  // every other candidate is the singleton {degree}.
  const std::uint64_t prefix = std::uint64_t{p - 1} >> (depth - level);
  std::string bits(level, '0');
  for (std::uint32_t k = 0; k < level; ++k)
    if ((prefix >> (level - 1 - k)) & 1U) bits[k] = '1';
  return {bits, port_range(degree, bits)};
}

std::size_t EpochPlan::waking_epochs() const noexcept {
  std::size_t count = 0;
  for (const auto& e : epochs)
    if (!e.woken.empty()) ++count;
  return count;
}

const ActorSet& EpochPlan::share(Node actor) const {
  const std::uint32_t e = epoch_of.at(actor);
  if (e == 0) throw std::invalid_argument("node is never an actor in this plan");
  return epochs[e - 1].shares[share_of[actor]];
}

std::uint64_t run_fingerprint(const PortNetwork& network, const WakeConfig& wake) {
  std::uint64_t h = network.fingerprint();
  for (Node v : wake.awake()) h = combine_seed(h, v);
  return h;
}

EpochPlan compute_epoch_plan(const PortNetwork& network, const WakeConfig& wake) {
  const std::size_t n = network.node_count();
  EpochPlan plan;
  plan.fingerprint = run_fingerprint(network, wake);
  plan.epoch_of.assign(n, 0);
  plan.share_of.assign(n, 0);

  std::vector<bool> in_prev(n, false), in_cur(n, false), in_next(n, false);
  std::vector<Node> current = wake.awake();
  sort_by_id(network, current);
  for (Node v : current) in_cur[v] = true;

  for (std::uint32_t epoch = 1; !current.empty(); ++epoch) {
    Epoch e;
    e.actors = current;
    for (std::uint32_t k = 0; k < current.size(); ++k) {
      const Node v = current[k];
      if (plan.epoch_of[v] != 0) throw std::logic_error("node would act in two epochs");
      plan.epoch_of[v] = epoch;
      plan.share_of[v] = k;
      ActorSet share{v, {}};
      for (const auto& far : network.ports(v)) {
        const Node u = far.node;
        if (in_cur[u] || in_prev[u] || in_next[u]) continue;
        in_next[u] = true;  // claimed by the lowest-ID actor adjacent to it
        share.sleepers.push_back(u);
        e.woken.push_back(u);
      }
      sort_by_id(network, share.sleepers);
      e.shares.push_back(std::move(share));
    }
    sort_by_id(network, e.woken);
    // Shift the window: A_{i-1} <- A_i, A_i <- S_i.
    std::fill(in_prev.begin(), in_prev.end(), false);
    for (Node v : current) in_prev[v] = true;
    std::fill(in_cur.begin(), in_cur.end(), false);
    for (Node u : e.woken) {
      in_cur[u] = true;
      in_next[u] = false;
    }
    current = e.woken;
    plan.epochs.push_back(std::move(e));
  }
  return plan;
}

ProxyChain build_proxy_chain(const PortNetwork& network, Node v, const std::vector<Node>& sleepers,
                             int beta) {
  ProxyChain chain;
  chain.actor = v;
  std::vector<Node> remaining = sleepers;
  sort_by_id(network, remaining);
  while (!remaining.empty()) {
    const Node w = remaining.front();
    const PortRange range = level_beta_range(network, v, w, beta).range;
    chain.members.push_back(w);
    chain.ranges.push_back(range);
    std::erase_if(remaining, [&](Node u) { return range.contains(network.port_to(v, u)); });
  }
  return chain;
}

AdviceAssignment assign_advice(const PortNetwork& network, const EpochPlan& plan, int alpha) {
  if (alpha < 0) throw std::invalid_argument("alpha must be nonnegative");
  AdviceAssignment out;
  out.alpha = alpha;
  out.beta = beta(alpha);
  out.advice.assign(network.node_count(), Advice{});
  if (alpha <= 2) return out;

  const int b = out.beta;
  std::vector<bool> carries_proxy(network.node_count(), false);
  for (const Epoch& epoch : plan.epochs) {
    for (const ActorSet& share : epoch.shares) {
      const Node v = share.actor;
      Advice& adv = out.advice[v];
      adv.g = at_least_pow2(share.sleepers.size(), b);
      if (*adv.g || share.sleepers.empty()) continue;

      ProxyChain chain = build_proxy_chain(network, v, share.sleepers, b);
      adv.lambda = pad_to(level_beta_range(network, v, chain.members.front(), b).bits, b);
      for (std::size_t j = 0; j < chain.members.size(); ++j) {
        const Node w = chain.members[j];
        if (carries_proxy[w])
          throw std::logic_error("node " + std::to_string(network.id(w)) +
                                 " would carry proxy advice for two actors");
        carries_proxy[w] = true;
        if (j + 1 < chain.members.size())
          out.advice[w].pi =
              pad_to(level_beta_range(network, v, chain.members[j + 1], b).bits, b);
      }
      out.chains.push_back(std::move(chain));
    }
  }
  for (Node v = 0; v < network.node_count(); ++v)
    if (out.advice[v].bit_length() > static_cast<std::size_t>(alpha))
      throw std::logic_error("advice exceeds the alpha-bit budget");
  return out;
}

void write_advice(std::ostream& out, const PortNetwork& network, const std::vector<Advice>& advice) {
  auto field = [](const std::string& s) { return s.empty() ? std::string("-") : s; };
  for (NodeId id = 1; id <= network.node_count(); ++id) {
    const Advice& a = advice.at(network.node_with_id(id));
    out << id << ' ' << (a.g ? (*a.g ? "1" : "0") : "-") << ' ' << field(a.lambda) << ' '
        << field(a.pi) << '\n';
  }
}

std::vector<Advice> read_advice(std::istream& in, const PortNetwork& network) {
  std::vector<Advice> advice(network.node_count());
  std::vector<bool> seen(network.node_count(), false);
  std::string line;
  auto bits = [](const std::string& s) {
    if (s == "-") return std::string{};
    if (s.find_first_not_of("01") != std::string::npos)
      throw std::invalid_argument("advice dump: malformed bit string '" + s + "'");
    return s;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    NodeId id;
    std::string g, lambda, pi;
    if (!(row >> id >> g >> lambda >> pi)) throw std::invalid_argument("advice dump: bad line");
    const Node v = network.node_with_id(id);
    if (seen[v]) throw std::invalid_argument("advice dump: duplicate ID");
    seen[v] = true;
    Advice& a = advice[v];
    if (g == "0" || g == "1") {
      a.g = (g == "1");
    } else if (g != "-") {
      throw std::invalid_argument("advice dump: g must be 0, 1 or -");
    }
    a.lambda = bits(lambda);
    a.pi = bits(pi);
  }
  return advice;
}

}  // namespace qwake
