#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qwake/network.hpp"
#include "qwake/scheduler.hpp"

namespace qwake::lb {

/// One computational-basis input |i, j, b> of a permutation unitary.
/// Indices are 1-based.
struct QueryTriple {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  std::uint8_t b = 0;
};

/// Query access to a permutation matrix P: O_P |i, j, b> = |i, j, b xor P_ij>.
///
/// `apply` is one coherent query: it acts on every branch of a superposition
/// at once and counts as a single query however many branches it touches.
class QueryOracle {
 public:
  virtual ~QueryOracle() = default;
  virtual std::size_t size() const noexcept = 0;
  virtual void apply(std::span<QueryTriple> branches) = 0;
  /// Classical read of P_ij; one query.
  bool query(std::uint32_t i, std::uint32_t j);
  std::uint64_t query_count() const noexcept { return queries_; }

 protected:
  void count_query() noexcept { ++queries_; }
  void check_index(std::uint32_t k) const;

 private:
  std::uint64_t queries_ = 0;
};

/// P for a permutation sigma of [n], given 1-based (`sigma[i-1]` = sigma(i)).
class PermutationOracle final : public QueryOracle {
 public:
  explicit PermutationOracle(std::vector<std::uint32_t> sigma);
  std::size_t size() const noexcept override { return sigma_.size(); }
  void apply(std::span<QueryTriple> branches) override;

 private:
  std::vector<std::uint32_t> sigma_;
};

/// P' on [2n] for the fixed-point-free involution sigma'(i) = n + sigma(i),
/// sigma'(n + i) = sigma^-1(i), simulated through a base oracle on [n].
/// Each query spends at most one base query; queries whose branches all stay
/// within one side answer 0 without touching the base.
class InvolutionOracle final : public QueryOracle {
 public:
  explicit InvolutionOracle(QueryOracle& base);
  std::size_t size() const noexcept override { return 2 * base_->size(); }
  void apply(std::span<QueryTriple> branches) override;
  const QueryOracle& base() const noexcept { return *base_; }

 private:
  QueryOracle* base_;
};

InvolutionOracle involution_from_permutation(QueryOracle& base);

/// Lifted permutation sigma' written out explicitly (test and report aid).
std::vector<std::uint32_t> lift_permutation(std::span<const std::uint32_t> sigma);

/// z_i = sigma(i) mod 2.
std::vector<std::uint8_t> single_bit_descriptor(std::span<const std::uint32_t> sigma);

/// Recovers the descriptor of sigma from the descriptor z' of sigma':
/// z_i = z'_i xor (n mod 2). Throws if |z'| != 2n.
std::vector<std::uint8_t> descriptor_from_lifted(std::span<const std::uint8_t> z_prime,
                                                 std::size_t n);

/// Far end of port j of v_i in H_n when the matched-bit is b: w_i for b = 1,
/// otherwise v_k with k = pi_C(i, j). Returns the node ID (v_k has ID k, w_i
/// has ID n + i).
NodeId tgt(std::uint32_t i, Port j, bool b, const PortNetwork& clique);

// ---------------------------------------------------------------------------
// Routing simulation

/// Message token stored in a register. 0 is the vacuum.
using Token = std::int32_t;
constexpr Token vacuum = 0;

/// Encodes payload `m` (>= 1) with its channel tag.
constexpr Token make_token(std::int32_t m, bool classical) noexcept {
  return 2 * m + (classical ? 1 : 0);
}
constexpr bool is_classical(Token t) noexcept { return (t & 1) != 0; }
constexpr std::int32_t payload(Token t) noexcept { return t / 2; }

/// Flat register layout for H_n with `mu` outbox entries. Nodes are the
/// H_n node indices 0..2n-1; edge-level registers exist for every ordered
/// pair, edge or not.
class RegisterLayout {
 public:
  RegisterLayout(const PortNetwork& realized, std::uint32_t mu);

  std::size_t n() const noexcept { return n_; }
  std::size_t nodes() const noexcept { return degree_.size(); }
  std::uint32_t mu() const noexcept { return mu_; }
  Port degree(Node u) const { return degree_.at(u); }
  std::size_t size() const noexcept { return size_; }

  std::size_t memory(Node u) const;
  std::size_t psend(Node u, Port j) const;
  std::size_t send(Node from, Node to) const;
  std::size_t receive(Node at, Node from) const;
  std::size_t outbox_i(std::uint32_t t) const;  // t in [1, mu]
  std::size_t outbox_j(std::uint32_t t) const;
  std::size_t outbox_message(std::uint32_t t) const;
  std::size_t reg_i() const noexcept { return size_ - 3; }
  std::size_t reg_j() const noexcept { return size_ - 2; }
  std::size_t reg_b() const noexcept { return size_ - 1; }

 private:
  std::size_t n_ = 0;
  std::uint32_t mu_ = 0;
  std::vector<Port> degree_;
  std::vector<std::size_t> psend_base_;
  std::size_t send_base_ = 0;
  std::size_t receive_base_ = 0;
  std::size_t outbox_base_ = 0;
  std::size_t size_ = 0;
};

using BasisState = std::vector<std::int32_t>;
using Amplitude = std::complex<double>;

/// Sparse superposition over register configurations.
struct SparseQuantumState {
  std::map<BasisState, Amplitude> amplitudes;

  double norm_squared() const;
  /// Drops entries with |amplitude| below `eps`.
  void prune(double eps = 1e-15);
};

/// Max over basis states of |a - b| entrywise, treating missing as 0.
double max_amplitude_distance(const SparseQuantumState& a, const SparseQuantumState& b);

struct PortSend {
  Node node = 0;
  Port port = 0;
  Token token = vacuum;
};

/// One computational-basis branch of a prepared round: the memory labels
/// (missing entries stay 0) and the declared port-sends.
struct Branch {
  Amplitude amplitude;
  std::vector<std::pair<Node, std::int32_t>> memory;
  std::vector<PortSend> sends;
};

/// State after U_prep: psend registers filled per branch, everything else
/// vacuum. Throws if amplitudes are not normalized to 1e-12, a port is
/// invalid, a port-send is given twice or two branches coincide.
SparseQuantumState prepare_round(const RegisterLayout& layout, std::span<const Branch> branches);

struct RoutingRound {
  SparseQuantumState state;
  std::uint64_t queries_used = 0;
};

/// Simulates delivery of one round's messages on H_n.
///
/// U_push moves V's non-vacuum port-sends into outbox entries by a stable
/// compaction ordered by (node ID, port); then for t = 1..mu the sequence
/// L_t O_X D_t O_X L_t routes entry t, where O_X is one coherent query to
/// `oracle` through (i, j) -> (i, pi_C(i, j)); W's sends are routed
/// directly; U_deliver swaps every send register into its receive register
/// and applies phase -1 to quantum tokens arriving at a sleeping node.
/// Outbox index registers keep the routed (i, j) pairs.
///
/// `oracle` encodes the hidden matching of `clique` (size n). `asleep` is
/// indexed by H_n node. Throws std::logic_error on outbox overflow, when the
/// start-of-round invariant is violated, or on normalization drift beyond
/// 1e-12.
RoutingRound simulate_routing_round(const RegisterLayout& layout, SparseQuantumState state,
                                    QueryOracle& oracle, const PortNetwork& clique,
                                    const std::vector<bool>& asleep);

// ---------------------------------------------------------------------------
// Matching and descriptor recovery

struct DescriptorResult {
  bool ok = false;
  std::vector<std::uint8_t> z;     // z_i = X_i mod 2
  Matching involution;             // symmetrized claims, empty on failure
  std::vector<std::uint32_t> uncovered_nodes;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> uncovered_edges;  // needs `truth`
  std::string error;
};

/// Converts per-center partner claims (1-based, index i-1 for v_i) into the
/// descriptor. Fails on inconsistent claims or when some node is neither
/// claiming nor claimed; with `truth`, the uncovered matched edges are listed.
DescriptorResult matching_to_descriptor(std::span<const std::optional<std::uint32_t>> outputs,
                                        std::size_t n, const Matching* truth = nullptr);

struct ReductionReport {
  std::size_t n = 0;
  Matching matching;
  std::uint64_t seed = 0;
  bool run_success = false;      // every node woke
  bool descriptor_correct = false;
  std::vector<std::uint8_t> descriptor;
  std::uint64_t classical = 0;   // including the n pendant replies
  std::uint64_t quantum = 0;
  std::uint64_t quantum_from_v = 0;
  std::uint64_t classical_from_v = 0;
  std::uint64_t charged_queries = 0;      // 2 per quantum message from V
  std::uint64_t charged_queries_all = 0;  // 2 per message from V
  std::string error;
};

/// Builds H_n for `sigma`, runs the wake-up algorithm with V awake, lets each
/// w_i report to v_i and converts the resulting claims into a descriptor.
ReductionReport end_to_end_reduction_check(std::size_t n, const Matching& sigma, int alpha,
                                           const WakeupParams& params, std::uint64_t seed);

std::string format_report(const ReductionReport& r);

}  // namespace qwake::lb
