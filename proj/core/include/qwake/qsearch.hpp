#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "qwake/network.hpp"
#include "qwake/rng.hpp"

namespace qwake {

/// How many quantum messages one oracle call costs: a query plus its
/// reflected response (default), or the query alone.
enum class MessageConvention { round_trip, single };

std::uint32_t messages_per_call(MessageConvention c) noexcept;
std::string_view to_string(MessageConvention c) noexcept;
/// Accepts "roundtrip2" and "single1".
MessageConvention parse_message_convention(std::string_view text);

struct SearchConfig {
  /// c in the per-invocation budget c * sqrt(N / max(1, C)) * log2 n.
  double budget_constant = 24.0;
  /// c' in the iterated bound c' * sqrt(N * max(C, 1)) * log2 n.
  double iterated_constant = 72.0;
  /// Schedule repetitions per invocation; 0 selects ceil(3 log2 n).
  std::uint32_t repetition_factor = 0;
  /// Growth of the iteration-count window per failed attempt.
  double growth = 1.2;
  MessageConvention convention = MessageConvention::round_trip;
};

/// One QuantumSearch(f, X) request. `marked` is read once per invocation,
/// which freezes the predicate for its duration.
struct SearchSpec {
  std::vector<Port> range;
  std::function<bool(Port)> marked;
  std::size_t n_global = 2;
  SearchConfig config;
  /// Test hook: the invocation spends its budget and returns NULL.
  bool force_failure = false;
};

struct SearchTranscript {
  std::optional<Port> result;
  std::uint64_t oracle_calls = 0;
  std::uint64_t quantum_messages = 0;
  std::uint64_t rounds = 0;

  SearchTranscript& operator+=(const SearchTranscript& o) noexcept {
    oracle_calls += o.oracle_calls;
    quantum_messages += o.quantum_messages;
    rounds += o.rounds;
    return *this;
  }
};

/// max(1, log2 n).
double log_factor(std::size_t n) noexcept;

/// Probability that measuring after k Grover iterations yields a marked
/// element when C of N elements are marked: sin^2((2k+1) asin(sqrt(C/N))).
double grover_success_probability(std::uint64_t n_elements, std::uint64_t n_marked,
                                  std::uint64_t iterations);

std::uint32_t effective_repetitions(const SearchConfig& config, std::size_t n_global);

/// ceil(c * sqrt(N / max(1, C)) * log2 n).
std::uint64_t search_budget(std::uint64_t n_elements, std::uint64_t n_marked,
                            std::size_t n_global, const SearchConfig& config);

/// c' * sqrt(N * max(C, 1)) * log2 n.
double iterated_budget(std::uint64_t n_elements, std::uint64_t n_marked, std::size_t n_global,
                       const SearchConfig& config);

/// Simulated QuantumSearch over spec.range.
///
/// Runs the exponentially growing random-iteration schedule for an unknown
/// number of marked elements, repeated up to the repetition factor, and
/// verifies every candidate with one extra oracle call. Each measurement is
/// drawn from the exact two-dimensional Grover amplitude, and a marked
/// outcome is uniform over the marked set. The call never exceeds
/// search_budget(); hitting it yields NULL.
SearchTranscript quantum_search(const SearchSpec& spec, Rng& rng);

struct IteratedSearchResult {
  std::vector<Port> found;  // in discovery order
  SearchTranscript total;
  std::vector<SearchTranscript> invocations;
};

/// IteratedQuantumSearch: repeat quantum_search, removing each found element
/// from the range, until an invocation returns NULL. `after_each` runs after
/// every invocation and before the next starts, so it may change what
/// `marked` reports.
IteratedSearchResult iterated_quantum_search(
    const SearchSpec& spec, Rng& rng,
    const std::function<void(const SearchTranscript&)>& after_each = {});

}  // namespace qwake
