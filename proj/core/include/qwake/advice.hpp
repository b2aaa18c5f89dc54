#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qwake/network.hpp"

namespace qwake {

/// Half-budget for each advice string: max(floor((alpha - 1) / 2), 0).
int beta(int alpha);

/// Inclusive port interval [lo, hi].
struct PortRange {
  Port lo = 1;
  Port hi = 1;

  Port size() const noexcept { return hi - lo + 1; }
  bool contains(Port p) const noexcept { return lo <= p && p <= hi; }
  bool overlaps(const PortRange& o) const noexcept { return lo <= o.hi && o.lo <= hi; }
  friend bool operator==(const PortRange&, const PortRange&) = default;
};

/// log2 of the smallest power of two that is >= degree.
std::uint32_t advice_tree_depth(Port degree);

/// Range of leaf labels reachable from the end of the root path spelled by
/// `bits` in the advice tree of a node with the given degree. Leaves are
/// labeled 1..degree left to right and the padding leaves repeat `degree`.
/// Throws std::invalid_argument if `bits` is longer than the tree is deep or
/// contains characters other than '0' and '1'.
PortRange port_range(Port degree, std::string_view bits);

/// Decodes a stored advice string: only the first min(|bits|, depth) bits
/// select the path; the remainder is padding.
PortRange advised_range(Port degree, std::string_view bits);

struct LevelRange {
  std::string bits;  // length min(beta, depth)
  PortRange range;
};

/// Level-beta port range of neighbor w with respect to v. When several
/// paths reach leaves labeled deg(v), the largest range wins.
LevelRange level_beta_range(const PortNetwork& network, Node v, Node w, int beta);

/// One actor's share of an epoch.
struct ActorSet {
  Node actor = 0;
  std::vector<Node> sleepers;  // S_v^(i), ascending ID
};

struct Epoch {
  std::vector<Node> actors;  // A_i, ascending ID
  std::vector<Node> woken;   // S_i, ascending ID
  std::vector<ActorSet> shares;  // parallel to `actors`
};

/// The oracle's epoch decomposition. `epochs[i-1]` is epoch i; the last
/// epoch always has an empty S_i.
struct EpochPlan {
  std::vector<Epoch> epochs;
  std::vector<std::uint32_t> epoch_of;  // node -> 1-based epoch in which it acts
  std::vector<std::uint32_t> share_of;  // node -> index into its epoch's shares
  std::uint64_t fingerprint = 0;        // network and wake set digest

  /// Number of epochs that wake somebody; equals the awake distance.
  std::size_t waking_epochs() const noexcept;
  const ActorSet& share(Node actor) const;
};

EpochPlan compute_epoch_plan(const PortNetwork& network, const WakeConfig& wake);

/// Digest tying plans and transcripts to one (network, wake set) input.
std::uint64_t run_fingerprint(const PortNetwork& network, const WakeConfig& wake);

/// Advice triple (g, Lambda, Pi). An absent `g` means the node received no
/// advice at all, which is the case for every node when alpha <= 2.
struct Advice {
  std::optional<bool> g;
  std::string lambda;
  std::string pi;

  std::size_t bit_length() const noexcept {
    return (g ? 1 : 0) + lambda.size() + pi.size();
  }
  friend bool operator==(const Advice&, const Advice&) = default;
};

/// Proxy chain w_1..w_k deposited for one g = 0 actor, with the level-beta
/// range of each member.
struct ProxyChain {
  Node actor = 0;
  std::vector<Node> members;
  std::vector<PortRange> ranges;
};

struct AdviceAssignment {
  int alpha = 0;
  int beta = 0;
  std::vector<Advice> advice;     // indexed by node
  std::vector<ProxyChain> chains;  // one per g = 0 actor with sleepers
};

/// Builds the proxy chain for actor v with sleeping set `sleepers`.
ProxyChain build_proxy_chain(const PortNetwork& network, Node v, const std::vector<Node>& sleepers,
                             int beta);

/// The oracle. Throws std::logic_error if two actors would deposit proxy
/// advice on the same node.
AdviceAssignment assign_advice(const PortNetwork& network, const EpochPlan& plan, int alpha);

/// Dump: one line per node in ID order, `id g lambda pi`, with `-` standing
/// for an absent or empty field.
void write_advice(std::ostream& out, const PortNetwork& network, const std::vector<Advice>& advice);
std::vector<Advice> read_advice(std::istream& in, const PortNetwork& network);

}  // namespace qwake
