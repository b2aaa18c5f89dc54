#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qwake/advice.hpp"
#include "qwake/network.hpp"
#include "qwake/qsearch.hpp"
#include "qwake/rng.hpp"

namespace qwake {

struct WakeupParams {
  /// C in tau = ceil(C * n * log2 n) rounds per phase.
  double phase_constant = 8.0;
  SearchConfig search;
  /// 0 selects n + 1, which exceeds any awake distance.
  std::uint32_t max_epochs = 0;
  /// Throw instead of flagging when an actor overruns its phase.
  bool strict_phase_budget = false;
  /// Keep the run-length per-round ledger (totals are always kept).
  bool keep_round_ledger = true;
  /// Fault injection: the first search of the actor with this ID fails.
  std::optional<NodeId> fault_actor;
  /// Metadata echoed in the summary record.
  int alpha = 0;
  std::uint64_t seed = 0;
  /// Optional event log sink.
  std::ostream* log = nullptr;
};

/// `rounds` consecutive rounds starting at `first_round`, each carrying the
/// same message counts.
struct LedgerSegment {
  std::uint64_t first_round = 0;
  std::uint64_t rounds = 0;
  std::uint32_t classical_per_round = 0;
  std::uint32_t quantum_per_round = 0;
};

struct PhaseTally {
  NodeId actor = 0;
  std::uint32_t epoch = 0;
  std::uint32_t phase = 0;
  std::uint64_t classical = 0;
  std::uint64_t quantum = 0;
};

struct MessageLedger {
  std::uint64_t classical_total = 0;
  std::uint64_t quantum_total = 0;
  std::uint64_t wake_messages = 0;
  std::uint64_t proxy_replies = 0;
  std::vector<LedgerSegment> rounds;
  std::vector<PhaseTally> phases;

  std::uint64_t total() const noexcept { return classical_total + quantum_total; }
};

enum class ActorMode { full_search, skip, advised };
std::string_view to_string(ActorMode m) noexcept;

/// What one actor did during its phase.
struct ActorLog {
  Node node = 0;
  NodeId id = 0;
  std::uint32_t epoch = 0;
  ActorMode mode = ActorMode::skip;
  std::optional<bool> g;
  std::vector<PortRange> ranges;         // ranges searched, in order
  std::vector<std::uint32_t> found_per_range;  // k_j
  std::vector<Node> sleepers_at_start;   // ascending ID
  std::vector<Node> sleepers_at_end;     // ascending ID
  std::uint64_t oracle_calls = 0;
  std::uint64_t quantum = 0;
  std::uint64_t classical = 0;
  std::uint64_t rounds_used = 0;
  bool over_budget = false;

  std::uint32_t chain_length() const noexcept { return static_cast<std::uint32_t>(ranges.size()); }
};

struct RunTranscript {
  std::size_t n = 0;
  int alpha = 0;
  int beta = 0;
  std::uint64_t seed = 0;
  std::uint64_t fingerprint = 0;
  std::uint64_t tau = 0;
  std::vector<NodeId> ids;  // node -> ID, for reporting
  MessageLedger ledger;
  std::vector<std::optional<std::uint64_t>> wake_round;  // 0 for initially awake
  std::vector<ActorLog> actors;                          // in execution order
  bool all_awake = false;
  std::uint32_t epochs_executed = 0;
  std::uint64_t rounds = 0;
  std::uint64_t search_quantum_total = 0;  // sum over search transcripts
  std::vector<std::string> flags;

  bool phase_budget_exceeded() const noexcept;
};

/// Executes the advice-driven wake-up algorithm.
///
/// Epochs consist of n phases of tau rounds; only the node with ID l may act
/// in phase l, and only once. A node woken during epoch i acts in epoch
/// i + 1. Actors with g = 1 or no advice run IteratedQuantumSearch over all
/// ports; g = 0 actors without Lambda skip; the rest search the Lambda range
/// and then follow proxy replies from the nodes they wake. Quantum traffic
/// never wakes a node. The run stops after the first epoch that leaves no
/// pending actor, or after max_epochs.
///
/// A run that ends with sleeping nodes reports all_awake = false. Throws
/// std::logic_error if a g = 0 actor is left with a sleeper outside every
/// advised range although no search has failed so far, or on a phase
/// overrun in strict mode.
RunTranscript run_wakeup(const PortNetwork& network, const WakeConfig& wake,
                         const std::vector<Advice>& advice, const WakeupParams& params, Rng& rng);

/// Plans, advises and runs in one call.
RunTranscript run_with_oracle(const PortNetwork& network, const WakeConfig& wake, int alpha,
                              const WakeupParams& params, std::uint64_t seed);

/// Classical flooding: each node sends on every port once, the round after
/// it wakes.
RunTranscript baseline_flood(const PortNetwork& network, const WakeConfig& wake);

struct PhaseViolation {
  NodeId actor = 0;
  std::uint32_t epoch = 0;
  std::string detail;
};

struct PhaseReport {
  std::vector<PhaseViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Checks, per actor, that its sleeping neighbors at phase start are exactly
/// S_v^(i) and that none remain asleep at phase end.
PhaseReport verify_phase_lemma(const RunTranscript& transcript, const EpochPlan& plan);

/// One-line summary record.
std::string summary_record(const RunTranscript& t);

/// Canonical text dump of the whole transcript (ledger, wake rounds and
/// actor logs); byte-identical for identical inputs.
std::string serialize_transcript(const RunTranscript& t);

}  // namespace qwake
