#include "qwake/qsearch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qwake {

std::uint32_t messages_per_call(MessageConvention c) noexcept {
  return c == MessageConvention::round_trip ? 2 : 1;
}

std::string_view to_string(MessageConvention c) noexcept {
  return c == MessageConvention::round_trip ? "roundtrip2" : "single1";
}

MessageConvention parse_message_convention(std::string_view text) {
  if (text == "roundtrip2") return MessageConvention::round_trip;
  if (text == "single1") return MessageConvention::single;
  throw std::invalid_argument("unknown message convention '" + std::string(text) + "'");
}

double log_factor(std::size_t n) noexcept {
  return std::max(1.0, std::log2(static_cast<double>(n)));
}

double grover_success_probability(std::uint64_t n_elements, std::uint64_t n_marked,
                                  std::uint64_t iterations) {
  if (n_elements == 0 || n_marked > n_elements)
    throw std::invalid_argument("grover_success_probability: need 0 <= C <= N, N > 0");
  const double theta = std::asin(std::sqrt(static_cast<double>(n_marked) / n_elements));
  const double s = std::sin((2.0 * static_cast<double>(iterations) + 1.0) * theta);
  return s * s;
}

std::uint32_t effective_repetitions(const SearchConfig& config, std::size_t n_global) {
  if (config.repetition_factor > 0) return config.repetition_factor;
  return static_cast<std::uint32_t>(std::ceil(3.0 * log_factor(n_global)));
}

std::uint64_t search_budget(std::uint64_t n_elements, std::uint64_t n_marked,
                            std::size_t n_global, const SearchConfig& config) {
  const double ratio = static_cast<double>(n_elements) /
                       static_cast<double>(std::max<std::uint64_t>(1, n_marked));
  return static_cast<std::uint64_t>(
      std::ceil(config.budget_constant * std::sqrt(ratio) * log_factor(n_global)));
}

double iterated_budget(std::uint64_t n_elements, std::uint64_t n_marked, std::size_t n_global,
                       const SearchConfig& config) {
  const double c = static_cast<double>(std::max<std::uint64_t>(1, n_marked));
  return config.iterated_constant * std::sqrt(static_cast<double>(n_elements) * c) *
         log_factor(n_global);
}

SearchTranscript quantum_search(const SearchSpec& spec, Rng& rng) {
  const std::uint64_t n_elements = spec.range.size();
  if (n_elements == 0) throw std::invalid_argument("quantum_search: empty search range");

  std::vector<Port> marked;
  for (Port p : spec.range)
    if (spec.marked(p)) marked.push_back(p);
  const std::uint64_t n_marked = marked.size();

  const std::uint64_t budget = search_budget(n_elements, n_marked, spec.n_global, spec.config);
  const std::uint32_t repetitions = effective_repetitions(spec.config, spec.n_global);
  const auto window_cap =
      static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(n_elements))));

  SearchTranscript out;
  auto finish = [&] {
    out.quantum_messages = out.oracle_calls * messages_per_call(spec.config.convention);
    out.rounds = out.oracle_calls;
    return out;
  };

  for (std::uint32_t rep = 0; rep < repetitions; ++rep) {
    double window = 1.0;
    for (;;) {
      const auto m = std::min(window_cap, static_cast<std::uint64_t>(std::ceil(window)));
      const std::uint64_t iterations = rng.uniform_index(m);
      // Grover iterations plus the verification query.
      const std::uint64_t cost = iterations + 1;
      if (out.oracle_calls + cost > budget) return finish();
      out.oracle_calls += cost;
      const double p = grover_success_probability(n_elements, n_marked, iterations);
      const bool hit = rng.uniform01() < p;
      if (hit && !spec.force_failure) {
        out.result = marked[rng.uniform_index(n_marked)];
        return finish();
      }
      if (m == window_cap) break;
      window *= spec.config.growth;
    }
  }
  return finish();
}

IteratedSearchResult iterated_quantum_search(
    const SearchSpec& spec, Rng& rng,
    const std::function<void(const SearchTranscript&)>& after_each) {
  IteratedSearchResult out;
  SearchSpec current = spec;
  while (!current.range.empty()) {
    SearchTranscript t = quantum_search(current, rng);
    out.total += t;
    out.invocations.push_back(t);
    if (after_each) after_each(t);
    if (!t.result) return out;
    const Port x = *t.result;
    out.found.push_back(x);
    std::erase(current.range, x);
    current.force_failure = false;
  }
  return out;
}

}  // namespace qwake
