#include "qwake/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qwake::lb {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

void check_permutation(std::span<const std::uint32_t> sigma) {
  std::vector<bool> seen(sigma.size() + 1, false);
  for (std::uint32_t x : sigma) {
    if (x < 1 || x > sigma.size() || seen[x]) fail("sigma is not a permutation of [n]");
    seen[x] = true;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Oracles

bool QueryOracle::query(std::uint32_t i, std::uint32_t j) {
  QueryTriple q{i, j, 0};
  apply(std::span<QueryTriple>(&q, 1));
  return q.b != 0;
}

void QueryOracle::check_index(std::uint32_t k) const {
  if (k < 1 || k > size()) fail("oracle index " + std::to_string(k) + " outside [1, " +
                                std::to_string(size()) + "]");
}

PermutationOracle::PermutationOracle(std::vector<std::uint32_t> sigma) : sigma_(std::move(sigma)) {
  if (sigma_.empty()) fail("permutation oracle needs n >= 1");
  check_permutation(sigma_);
}

void PermutationOracle::apply(std::span<QueryTriple> branches) {
  for (const auto& q : branches) {
    check_index(q.i);
    check_index(q.j);
  }
  count_query();
  for (auto& q : branches) q.b ^= static_cast<std::uint8_t>(sigma_[q.i - 1] == q.j);
}

InvolutionOracle::InvolutionOracle(QueryOracle& base) : base_(&base) {
  if (base.size() == 0) fail("involution oracle needs n >= 1");
}

void InvolutionOracle::apply(std::span<QueryTriple> branches) {
  const auto n = static_cast<std::uint32_t>(base_->size());
  for (const auto& q : branches) {
    check_index(q.i);
    check_index(q.j);
  }
  count_query();
  // Cross-side branches are answered by one coherent base query; same-side
  // branches sit in the zero blocks of P'.
  std::vector<QueryTriple> lowered;
  std::vector<std::size_t> origin;
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const auto& q = branches[k];
    if (q.i <= n && q.j > n) {
      lowered.push_back({q.i, q.j - n, q.b});
    } else if (q.i > n && q.j <= n) {
      lowered.push_back({q.j, q.i - n, q.b});
    } else {
      continue;
    }
    origin.push_back(k);
  }
  if (lowered.empty()) return;
  base_->apply(lowered);
  for (std::size_t k = 0; k < lowered.size(); ++k) branches[origin[k]].b = lowered[k].b;
}

InvolutionOracle involution_from_permutation(QueryOracle& base) { return InvolutionOracle(base); }

std::vector<std::uint32_t> lift_permutation(std::span<const std::uint32_t> sigma) {
  check_permutation(sigma);
  const auto n = static_cast<std::uint32_t>(sigma.size());
  std::vector<std::uint32_t> lifted(2 * n);
  for (std::uint32_t i = 1; i <= n; ++i) {
    lifted[i - 1] = n + sigma[i - 1];
    lifted[n + sigma[i - 1] - 1] = i;
  }
  return lifted;
}

std::vector<std::uint8_t> single_bit_descriptor(std::span<const std::uint32_t> sigma) {
  std::vector<std::uint8_t> z(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) z[i] = static_cast<std::uint8_t>(sigma[i] % 2);
  return z;
}

std::vector<std::uint8_t> descriptor_from_lifted(std::span<const std::uint8_t> z_prime,
                                                 std::size_t n) {
  if (z_prime.size() != 2 * n)
    fail("lifted descriptor has length " + std::to_string(z_prime.size()) + ", expected " +
         std::to_string(2 * n));
  std::vector<std::uint8_t> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = static_cast<std::uint8_t>(z_prime[i] ^ (n % 2));
  return z;
}

NodeId tgt(std::uint32_t i, Port j, bool b, const PortNetwork& clique) {
  const auto n = static_cast<std::uint32_t>(clique.node_count());
  if (i < 1 || i > n) fail("tgt: clique index out of range");
  if (j < 1 || j > clique.degree(i - 1)) fail("tgt: invalid port");
  if (b) return n + i;
  return clique.id(clique.endpoint(i - 1, j).node);
}

// ---------------------------------------------------------------------------
// Register layout and sparse states

RegisterLayout::RegisterLayout(const PortNetwork& realized, std::uint32_t mu) : mu_(mu) {
  const std::size_t nodes = realized.node_count();
  if (nodes % 2 != 0) fail("register layout expects an H_n instance with 2n nodes");
  n_ = nodes / 2;
  std::size_t offset = nodes;  // memory registers come first
  for (Node u = 0; u < nodes; ++u) {
    degree_.push_back(realized.degree(u));
    psend_base_.push_back(offset);
    offset += realized.degree(u);
  }
  send_base_ = offset;
  offset += nodes * nodes;
  receive_base_ = offset;
  offset += nodes * nodes;
  outbox_base_ = offset;
  offset += 3 * std::size_t{mu};
  size_ = offset + 3;
}

std::size_t RegisterLayout::memory(Node u) const {
  if (u >= nodes()) fail("layout: node out of range");
  return u;
}

std::size_t RegisterLayout::psend(Node u, Port j) const {
  if (u >= nodes() || j < 1 || j > degree_[u]) fail("layout: invalid port-send register");
  return psend_base_[u] + (j - 1);
}

std::size_t RegisterLayout::send(Node from, Node to) const {
  if (from >= nodes() || to >= nodes()) fail("layout: node out of range");
  return send_base_ + from * nodes() + to;
}

std::size_t RegisterLayout::receive(Node at, Node from) const {
  if (from >= nodes() || at >= nodes()) fail("layout: node out of range");
  return receive_base_ + at * nodes() + from;
}

std::size_t RegisterLayout::outbox_i(std::uint32_t t) const {
  if (t < 1 || t > mu_) fail("layout: outbox index out of range");
  return outbox_base_ + 3 * (t - 1);
}
std::size_t RegisterLayout::outbox_j(std::uint32_t t) const { return outbox_i(t) + 1; }
std::size_t RegisterLayout::outbox_message(std::uint32_t t) const { return outbox_i(t) + 2; }

double SparseQuantumState::norm_squared() const {
  double total = 0.0;
  for (const auto& [basis, a] : amplitudes) total += std::norm(a);
  return total;
}

void SparseQuantumState::prune(double eps) {
  std::erase_if(amplitudes, [eps](const auto& kv) { return std::abs(kv.second) < eps; });
}

double max_amplitude_distance(const SparseQuantumState& a, const SparseQuantumState& b) {
  double worst = 0.0;
  for (const auto& [basis, amp] : a.amplitudes) {
    const auto it = b.amplitudes.find(basis);
    const Amplitude other = it == b.amplitudes.end() ? Amplitude{} : it->second;
    worst = std::max(worst, std::abs(amp - other));
  }
  for (const auto& [basis, amp] : b.amplitudes)
    if (!a.amplitudes.contains(basis)) worst = std::max(worst, std::abs(amp));
  return worst;
}

SparseQuantumState prepare_round(const RegisterLayout& layout, std::span<const Branch> branches) {
  SparseQuantumState state;
  for (const Branch& br : branches) {
    BasisState basis(layout.size(), vacuum);
    for (const auto& [u, label] : br.memory) basis[layout.memory(u)] = label;
    for (const PortSend& s : br.sends) {
      if (s.token == vacuum) continue;
      const std::size_t slot = layout.psend(s.node, s.port);
      if (basis[slot] != vacuum) fail("prepare_round: port-send register written twice");
      basis[slot] = s.token;
    }
    if (!state.amplitudes.emplace(std::move(basis), br.amplitude).second)
      fail("prepare_round: two branches share a basis state");
  }
  if (std::abs(state.norm_squared() - 1.0) > 1e-12) fail("prepare_round: state is not normalized");
  return state;
}

namespace {

// v_k has ID k and w_i has ID n + i; both sit at node ID - 1.
Node node_of_id(NodeId id) { return id - 1; }

/// One coherent O_X over every basis state: |i, j, b> -> |i, j, b xor
/// P_{i, pi_C(i, j)}>; identity where I holds the vacuum index.
void apply_lookup(std::vector<std::pair<BasisState, Amplitude>>& terms, const RegisterLayout& layout,
                  QueryOracle& oracle, const PortNetwork& clique) {
  std::vector<QueryTriple> batch;
  std::vector<std::size_t> origin;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const BasisState& s = terms[k].first;
    const auto i = static_cast<std::uint32_t>(s[layout.reg_i()]);
    if (i == 0) continue;
    const auto j = static_cast<Port>(s[layout.reg_j()]);
    batch.push_back({i, clique.id(clique.endpoint(i - 1, j).node),
                     static_cast<std::uint8_t>(s[layout.reg_b()])});
    origin.push_back(k);
  }
  oracle.apply(batch);
  for (std::size_t k = 0; k < batch.size(); ++k) terms[origin[k]].first[layout.reg_b()] = batch[k].b;
}

}  // namespace

RoutingRound simulate_routing_round(const RegisterLayout& layout, SparseQuantumState state,
                                    QueryOracle& oracle, const PortNetwork& clique,
                                    const std::vector<bool>& asleep) {
  const std::size_t n = layout.n();
  const std::size_t nodes = layout.nodes();
  if (clique.node_count() != n || oracle.size() != n)
    throw std::invalid_argument("clique and oracle must both have size n");
  if (asleep.size() != nodes) throw std::invalid_argument("sleep mask must cover every node");

  std::vector<std::pair<BasisState, Amplitude>> terms(state.amplitudes.begin(),
                                                      state.amplitudes.end());
  // Start-of-round invariant: only port-send and memory registers may be set.
  for (const auto& [s, a] : terms) {
    for (Node u = 0; u < nodes; ++u)
      for (Node v = 0; v < nodes; ++v)
        if (s[layout.send(u, v)] != vacuum || s[layout.receive(v, u)] != vacuum)
          throw std::logic_error("edge registers must be vacuum at round start");
    for (std::uint32_t t = 1; t <= layout.mu(); ++t)
      if (s[layout.outbox_i(t)] || s[layout.outbox_j(t)] || s[layout.outbox_message(t)])
        throw std::logic_error("outbox must be vacuum at round start");
    if (s[layout.reg_i()] || s[layout.reg_j()] || s[layout.reg_b()])
      throw std::logic_error("workspace registers must be vacuum at round start");
  }

  // U_push: stable compaction of V's sends by (node ID, port).
  for (auto& [s, a] : terms) {
    std::uint32_t t = 0;
    for (Node u = 0; u < n; ++u)
      for (Port j = 1; j <= layout.degree(u); ++j) {
        Token& slot = s[layout.psend(u, j)];
        if (slot == vacuum) continue;
        if (++t > layout.mu())
          throw std::logic_error("outbox overflow: more than mu sends from V in one branch");
        s[layout.outbox_i(t)] = static_cast<std::int32_t>(u + 1);
        s[layout.outbox_j(t)] = static_cast<std::int32_t>(j);
        s[layout.outbox_message(t)] = slot;
        slot = vacuum;
      }
  }

  RoutingRound out;
  auto load = [&](std::uint32_t t) {
    for (auto& [s, a] : terms) {
      std::swap(s[layout.reg_i()], s[layout.outbox_i(t)]);
      std::swap(s[layout.reg_j()], s[layout.outbox_j(t)]);
    }
  };
  const std::uint64_t before = oracle.query_count();
  for (std::uint32_t t = 1; t <= layout.mu(); ++t) {
    load(t);
    apply_lookup(terms, layout, oracle, clique);
    ++out.queries_used;
    // D_t: swap message_t with send_{v_i -> tgt(i, j, b)}.
    for (auto& [s, a] : terms) {
      const auto i = static_cast<std::uint32_t>(s[layout.reg_i()]);
      if (i == 0) continue;
      const NodeId to = tgt(i, static_cast<Port>(s[layout.reg_j()]), s[layout.reg_b()] != 0, clique);
      std::swap(s[layout.outbox_message(t)], s[layout.send(i - 1, node_of_id(to))]);
    }
    apply_lookup(terms, layout, oracle, clique);
    ++out.queries_used;
    load(t);
  }
  if (oracle.query_count() - before != out.queries_used)
    throw std::logic_error("oracle query count disagrees with the routing schedule");

  // W's single port always leads to its own center; no query needed.
  for (auto& [s, a] : terms)
    for (Node w = static_cast<Node>(n); w < nodes; ++w)
      for (Port j = 1; j <= layout.degree(w); ++j) {
        Token& slot = s[layout.psend(w, j)];
        if (slot == vacuum) continue;
        std::swap(slot, s[layout.send(w, w - static_cast<Node>(n))]);
      }

  // U_deliver plus the sleeping-NIC phase.
  for (auto& [s, a] : terms)
    for (Node u = 0; u < nodes; ++u)
      for (Node v = 0; v < nodes; ++v) {
        if (u == v) continue;
        Token& sent = s[layout.send(u, v)];
        Token& got = s[layout.receive(v, u)];
        std::swap(sent, got);
        if (got != vacuum && !is_classical(got) && asleep[v]) a = -a;
      }

  for (auto& [s, a] : terms)
    if (!out.state.amplitudes.emplace(std::move(s), a).second)
      throw std::logic_error("routing merged two basis states");
  if (std::abs(out.state.norm_squared() - state.norm_squared()) > 1e-12)
    throw std::logic_error("routing changed the state norm");
  return out;
}

// ---------------------------------------------------------------------------
// Descriptor recovery

DescriptorResult matching_to_descriptor(std::span<const std::optional<std::uint32_t>> outputs,
                                        std::size_t n, const Matching* truth) {
  DescriptorResult r;
  if (outputs.size() != n) fail("matching outputs must have one slot per center node");
  if (truth && truth->size() != n) fail("reference matching has the wrong size");

  Matching partner(n, 0);
  auto set = [&](std::uint32_t a, std::uint32_t b) {
    if (partner[a - 1] != 0 && partner[a - 1] != b) {
      r.error = "inconsistent claims for node " + std::to_string(a) + ": " +
                std::to_string(partner[a - 1]) + " vs " + std::to_string(b);
      return false;
    }
    partner[a - 1] = b;
    return true;
  };
  for (std::uint32_t i = 1; i <= n; ++i) {
    const auto& claim = outputs[i - 1];
    if (!claim) continue;
    const std::uint32_t k = *claim;
    if (k < 1 || k > n || k == i) {
      r.error = "node " + std::to_string(i) + " claims invalid partner " + std::to_string(k);
      return r;
    }
    if (!set(i, k) || !set(k, i)) return r;
  }
  for (std::uint32_t i = 1; i <= n; ++i)
    if (partner[i - 1] == 0) r.uncovered_nodes.push_back(i);
  if (truth) {
    for (std::uint32_t i = 1; i <= n; ++i) {
      const std::uint32_t k = (*truth)[i - 1];
      if (i < k && partner[i - 1] != k && partner[k - 1] != i) r.uncovered_edges.emplace_back(i, k);
    }
  }
  if (!r.uncovered_nodes.empty() || !r.uncovered_edges.empty()) {
    r.error = "matching not covered";
    return r;
  }
  r.ok = true;
  r.z = single_bit_descriptor(partner);
  r.involution = std::move(partner);
  return r;
}

ReductionReport end_to_end_reduction_check(std::size_t n, const Matching& sigma, int alpha,
                                           const WakeupParams& params, std::uint64_t seed) {
  ReductionReport rep;
  rep.n = n;
  rep.matching = sigma;
  rep.seed = seed;
  const HiddenMatchingInstance inst =
      build_hidden_matching_graph(n, sigma, complete_graph(n, combine_seed(seed, 0x70727473)));
  const RunTranscript run =
      run_with_oracle(inst.network, inst.centers_awake(), alpha, params, combine_seed(seed, 1));
  rep.run_success = run.all_awake;
  rep.classical = run.ledger.classical_total;
  rep.quantum = run.ledger.quantum_total;
  for (const ActorLog& a : run.actors) {
    if (a.node >= n) continue;
    rep.quantum_from_v += a.quantum;
    for (std::uint32_t k : a.found_per_range) rep.classical_from_v += k;
  }

  // Each awake pendant w_i sends one message to v_i; the arrival port j lets
  // v_i claim X_i = pi_C(i, j).
  std::vector<std::optional<std::uint32_t>> claims(n);
  for (std::uint32_t i = 1; i <= n; ++i) {
    if (!run.wake_round[inst.w(i)]) continue;
    ++rep.classical;
    const Port j = inst.network.port_to(inst.v(i), inst.w(i));
    claims[i - 1] = inst.clique_partner(i, j);
  }
  rep.charged_queries = 2 * rep.quantum_from_v;
  rep.charged_queries_all = 2 * (rep.quantum_from_v + rep.classical_from_v);

  const DescriptorResult d = matching_to_descriptor(claims, n, &sigma);
  if (!d.ok) {
    rep.error = d.error;
    return rep;
  }
  rep.descriptor = d.z;
  rep.descriptor_correct = d.z == single_bit_descriptor(sigma);
  return rep;
}

std::string format_report(const ReductionReport& r) {
  std::ostringstream out;
  out << "n=" << r.n << " matching=";
  for (std::size_t i = 0; i < r.matching.size(); ++i) out << (i ? "," : "") << r.matching[i];
  out << " seed=" << r.seed << " success=" << (r.run_success && r.descriptor_correct ? 1 : 0)
      << " classical=" << r.classical << " quantum=" << r.quantum
      << " quantum_v=" << r.quantum_from_v << " charged=" << r.charged_queries
      << " charged_all=" << r.charged_queries_all << " z=";
  if (r.descriptor.empty()) out << '-';
  for (auto b : r.descriptor) out << int(b);
  if (!r.error.empty()) out << " error=\"" << r.error << '"';
  return out.str();
}

}  // namespace qwake::lb
