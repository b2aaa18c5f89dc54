#include "qwake/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qwake {

std::string_view to_string(ActorMode m) noexcept {
  switch (m) {
    case ActorMode::full_search: return "full";
    case ActorMode::skip: return "skip";
    case ActorMode::advised: return "advised";
  }
  return "?";
}

bool RunTranscript::phase_budget_exceeded() const noexcept {
  return std::any_of(actors.begin(), actors.end(), [](const ActorLog& a) { return a.over_budget; });
}

namespace {

std::string join_ids(const std::vector<Node>& nodes, const std::vector<NodeId>& ids) {
  std::string out = "{";
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(ids[nodes[k]]);
  }
  return out + "}";
}

void record(MessageLedger& ledger, bool keep_rounds, std::uint64_t first, std::uint64_t count,
            std::uint32_t classical, std::uint32_t quantum) {
  if (count == 0) return;
  ledger.classical_total += std::uint64_t{classical} * count;
  ledger.quantum_total += std::uint64_t{quantum} * count;
  if (!keep_rounds) return;
  auto& segs = ledger.rounds;
  if (!segs.empty()) {
    LedgerSegment& last = segs.back();
    if (last.first_round + last.rounds == first && last.classical_per_round == classical &&
        last.quantum_per_round == quantum) {
      last.rounds += count;
      return;
    }
    if (last.first_round + last.rounds > first && last.rounds == 1 && last.first_round == first) {
      // Same round: fold the counts together.
      last.classical_per_round += classical;
      last.quantum_per_round += quantum;
      if (count == 1) return;
      ++first;
      --count;
    }
  }
  segs.push_back({first, count, classical, quantum});
}

/// Mutable engine state for one run.
class Engine {
 public:
  Engine(const PortNetwork& net, const WakeConfig& wake, const std::vector<Advice>& advice,
         const WakeupParams& params, Rng& rng)
      : net_(net), advice_(advice), params_(params), rng_(rng), n_(net.node_count()),
        awake_(n_, false), acted_(n_, false), act_epoch_(n_, 0) {
    if (advice.size() != n_) throw std::invalid_argument("advice map size does not match network");
    t_.n = n_;
    t_.alpha = params.alpha;
    t_.beta = beta(params.alpha);
    t_.seed = params.seed;
    t_.fingerprint = run_fingerprint(net, wake);
    t_.tau = static_cast<std::uint64_t>(
        std::ceil(params.phase_constant * static_cast<double>(n_) * log_factor(n_)));
    t_.ids = net.ids();
    t_.wake_round.assign(n_, std::nullopt);
    for (Node v : wake.awake()) {
      awake_[v] = true;
      act_epoch_[v] = 1;
      t_.wake_round[v] = 0;
    }
  }

  RunTranscript run() {
    const std::uint32_t max_epochs =
        params_.max_epochs ? params_.max_epochs : static_cast<std::uint32_t>(n_ + 1);
    std::uint32_t epoch = 0;
    while (epoch < max_epochs && pending() > 0) {
      ++epoch;
      log(phase_start(epoch, 1)) << "epoch-start epoch=" << epoch << '\n';
      for (NodeId id = 1; id <= n_; ++id) {
        const Node v = net_.node_with_id(id);
        if (awake_[v] && !acted_[v] && act_epoch_[v] <= epoch) act(v, epoch, id);
      }
    }
    t_.epochs_executed = epoch;
    t_.rounds = std::uint64_t{epoch} * n_ * t_.tau;
    t_.all_awake = std::all_of(awake_.begin(), awake_.end(), [](bool b) { return b; });
    if (pending() > 0) t_.flags.push_back("max-epochs-exceeded");
    if (!t_.all_awake) t_.flags.push_back("sleepers-remain");
    log(t_.rounds) << "summary " << summary_record(t_) << '\n';
    return std::move(t_);
  }

 private:
  std::size_t pending() const {
    std::size_t count = 0;
    for (Node v = 0; v < n_; ++v) count += awake_[v] && !acted_[v];
    return count;
  }

  std::uint64_t phase_start(std::uint32_t epoch, std::uint32_t phase) const {
    return ((std::uint64_t{epoch} - 1) * n_ + (phase - 1)) * t_.tau + 1;
  }

  std::ostream& log(std::uint64_t round) {
    if (!params_.log) return null_;
    return *params_.log << round << ' ';
  }

  std::vector<Node> sleeping_neighbors(Node v) const {
    std::vector<Node> out;
    for (const auto& e : net_.ports(v))
      if (!awake_[e.node]) out.push_back(e.node);
    std::sort(out.begin(), out.end(), [&](Node a, Node b) { return net_.id(a) < net_.id(b); });
    return out;
  }

  void charge(ActorLog& a, std::uint64_t first, std::uint64_t count, std::uint32_t classical,
              std::uint32_t quantum) {
    record(t_.ledger, params_.keep_round_ledger, first, count, classical, quantum);
    a.classical += std::uint64_t{classical} * count;
    a.quantum += std::uint64_t{quantum} * count;
  }

  /// Sends the wake message on port p during round cursor_. Returns the
  /// woken node's proxy advice, if it replied with any.
  std::optional<std::string> wake(ActorLog& a, Node v, Port p, std::uint32_t epoch) {
    const Node u = net_.endpoint(v, p).node;
    if (awake_[u]) throw std::logic_error("search returned an awake neighbor");
    const std::uint64_t send_round = cursor_++;
    charge(a, send_round, 1, 1, 0);
    ++t_.ledger.wake_messages;
    log(send_round) << "classical-send from=" << net_.id(v) << " port=" << p
                    << " kind=wake clock=" << send_round << '\n';
    awake_[u] = true;
    act_epoch_[u] = epoch + 1;
    t_.wake_round[u] = send_round + 1;
    log(send_round + 1) << "wake id=" << net_.id(u) << " by=" << net_.id(v) << '\n';
    const std::string& pi = advice_[u].pi;
    if (pi.empty()) return std::nullopt;
    // The reply leaves in the woken node's first round and is usable by the
    // actor from the round after.
    charge(a, send_round + 1, 1, 1, 0);
    ++t_.ledger.proxy_replies;
    log(send_round + 1) << "classical-send from=" << net_.id(u)
                        << " port=" << net_.endpoint(v, p).port << " kind=proxy-reply bits=" << pi
                        << '\n';
    reply_ready_ = std::max(reply_ready_, send_round + 2);
    return pi;
  }

  /// Runs IteratedQuantumSearch on `range`, waking each find. Returns the
  /// proxy strings received.
  std::vector<std::string> search(ActorLog& a, Node v, std::vector<Port> range,
                                  std::uint32_t epoch, bool& force_failure) {
    SearchSpec spec;
    spec.range = std::move(range);
    spec.marked = [&, v](Port p) { return !awake_[net_.endpoint(v, p).node]; };
    spec.n_global = n_;
    spec.config = params_.search;
    spec.force_failure = force_failure;
    force_failure = false;

    std::vector<std::string> proxies;
    const std::uint32_t per_call = messages_per_call(params_.search.convention);
    std::uint32_t found = 0;
    const PortRange span{spec.range.front(), spec.range.back()};
    iterated_quantum_search(spec, rng_, [&](const SearchTranscript& st) {
      const std::uint64_t start = cursor_;
      charge(a, start, st.oracle_calls, 0, per_call);
      cursor_ += st.rounds;
      a.oracle_calls += st.oracle_calls;
      t_.search_quantum_total += st.quantum_messages;
      log(start) << "quantum-query id=" << net_.id(v) << " range=" << span.lo << '-' << span.hi
                 << " calls=" << st.oracle_calls << " result="
                 << (st.result ? std::to_string(*st.result) : std::string("NULL")) << '\n';
      if (st.result) {
        ++found;
        if (auto pi = wake(a, v, *st.result, epoch)) proxies.push_back(std::move(*pi));
      }
    });
    a.found_per_range.push_back(found);
    return proxies;
  }

  static std::vector<Port> ports_of(PortRange r) {
    std::vector<Port> out(r.size());
    std::iota(out.begin(), out.end(), r.lo);
    return out;
  }

  void act(Node v, std::uint32_t epoch, NodeId id) {
    acted_[v] = true;
    const std::uint64_t start = phase_start(epoch, id);
    cursor_ = start;
    reply_ready_ = start;
    bool force_failure = params_.fault_actor && *params_.fault_actor == id;

    ActorLog a;
    a.node = v;
    a.id = id;
    a.epoch = epoch;
    a.g = advice_[v].g;
    a.sleepers_at_start = sleeping_neighbors(v);
    const Advice& adv = advice_[v];
    if (!adv.g || *adv.g) {
      a.mode = ActorMode::full_search;
    } else if (adv.lambda.empty()) {
      a.mode = ActorMode::skip;
    } else {
      a.mode = ActorMode::advised;
    }

    log(start) << "phase-start epoch=" << epoch << " phase=" << id << " actor=" << id << '\n';
    log(start) << "actor-begin id=" << id << " mode=" << to_string(a.mode)
               << " sleepers=" << a.sleepers_at_start.size() << '\n';

    const Port degree = net_.degree(v);
    if (a.mode == ActorMode::full_search && degree > 0) {
      const PortRange all{1, degree};
      a.ranges.push_back(all);
      search(a, v, ports_of(all), epoch, force_failure);
    } else if (a.mode == ActorMode::advised) {
      PortRange range = advised_range(degree, adv.lambda);
      for (;;) {
        a.ranges.push_back(range);
        auto proxies = search(a, v, ports_of(range), epoch, force_failure);
        if (proxies.empty()) break;
        if (proxies.size() > 1) t_.flags.push_back("multiple-proxy-replies id=" + std::to_string(id));
        cursor_ = std::max(cursor_, reply_ready_);
        const PortRange next = advised_range(degree, proxies.front());
        const bool repeats = std::any_of(a.ranges.begin(), a.ranges.end(),
                                         [&](const PortRange& r) { return r.overlaps(next); });
        if (repeats) {
          t_.flags.push_back("proxy-range-overlap id=" + std::to_string(id));
          break;
        }
        range = next;
      }
    }

    a.sleepers_at_end = sleeping_neighbors(v);
    a.rounds_used = cursor_ - start;
    if (a.rounds_used > t_.tau) {
      a.over_budget = true;
      t_.flags.push_back("phase-overrun id=" + std::to_string(id));
      if (params_.strict_phase_budget)
        throw std::logic_error("actor " + std::to_string(id) + " overran its phase");
    }

    if (!a.sleepers_at_end.empty()) {
      if (a.mode == ActorMode::advised && clean_) {
        for (Node s : a.sleepers_at_end) {
          const Port p = net_.port_to(v, s);
          const bool covered = std::any_of(a.ranges.begin(), a.ranges.end(),
                                           [&](const PortRange& r) { return r.contains(p); });
          if (!covered)
            throw std::logic_error("actor " + std::to_string(id) + " left sleeper " +
                                   std::to_string(net_.id(s)) + " outside every advised range");
        }
      }
      clean_ = false;
    }

    if (a.mode == ActorMode::advised) {
      // Per-actor message bound for g = 0 actors.
      const double k = static_cast<double>(a.sleepers_at_start.size());
      const double b = static_cast<double>(adv.lambda.size());
      const double bound = messages_per_call(params_.search.convention) *
                           params_.search.iterated_constant * k *
                           std::sqrt(2.0 * static_cast<double>(n_) / std::exp2(b)) * log_factor(n_);
      if (static_cast<double>(a.quantum) > bound)
        t_.flags.push_back("g0-bound id=" + std::to_string(id));
    }

    t_.ledger.phases.push_back({id, epoch, id, a.classical, a.quantum});
    log(cursor_) << "actor-end id=" << id << " quantum=" << a.quantum
                 << " classical=" << a.classical << " rounds=" << a.rounds_used << '\n';
    t_.actors.push_back(std::move(a));
  }

  const PortNetwork& net_;
  const std::vector<Advice>& advice_;
  const WakeupParams& params_;
  Rng& rng_;
  std::size_t n_;
  std::vector<bool> awake_;
  std::vector<bool> acted_;
  std::vector<std::uint32_t> act_epoch_;
  std::uint64_t cursor_ = 0;
  std::uint64_t reply_ready_ = 0;
  bool clean_ = true;
  RunTranscript t_;
  std::ostream null_{nullptr};
};

}  // namespace

RunTranscript run_wakeup(const PortNetwork& network, const WakeConfig& wake,
                         const std::vector<Advice>& advice, const WakeupParams& params, Rng& rng) {
  return Engine(network, wake, advice, params, rng).run();
}

RunTranscript run_with_oracle(const PortNetwork& network, const WakeConfig& wake, int alpha,
                              const WakeupParams& params, std::uint64_t seed) {
  const EpochPlan plan = compute_epoch_plan(network, wake);
  const AdviceAssignment assignment = assign_advice(network, plan, alpha);
  WakeupParams p = params;
  p.alpha = alpha;
  p.seed = seed;
  Rng rng(seed);
  return run_wakeup(network, wake, assignment.advice, p, rng);
}

RunTranscript baseline_flood(const PortNetwork& network, const WakeConfig& wake) {
  const std::size_t n = network.node_count();
  const auto dist = awake_distances(network, wake);
  RunTranscript t;
  t.n = n;
  t.fingerprint = run_fingerprint(network, wake);
  t.ids = network.ids();
  t.wake_round.assign(n, std::nullopt);
  std::uint32_t radius = 0;
  std::vector<std::uint64_t> sends_by_layer;
  for (Node v = 0; v < n; ++v) {
    if (dist[v] == std::numeric_limits<std::uint32_t>::max()) continue;
    radius = std::max(radius, dist[v]);
    t.wake_round[v] = dist[v] == 0 ? 0 : std::uint64_t{dist[v]} + 1;
    if (sends_by_layer.size() <= dist[v]) sends_by_layer.resize(dist[v] + 1, 0);
    sends_by_layer[dist[v]] += network.degree(v);
  }
  // Layer d sends in round d + 1; the layer-(d+1) receivers wake in round d + 2.
  for (std::uint32_t d = 0; d < sends_by_layer.size(); ++d)
    record(t.ledger, true, d + 1, 1, static_cast<std::uint32_t>(sends_by_layer[d]), 0);
  for (Node v = 0; v < n; ++v)
    if (dist[v] != 0 && dist[v] != std::numeric_limits<std::uint32_t>::max())
      ++t.ledger.wake_messages;
  t.all_awake = std::all_of(t.wake_round.begin(), t.wake_round.end(),
                            [](const auto& r) { return r.has_value(); });
  t.rounds = radius;
  t.epochs_executed = 0;
  return t;
}

PhaseReport verify_phase_lemma(const RunTranscript& transcript, const EpochPlan& plan) {
  PhaseReport report;
  auto violation = [&](NodeId id, std::uint32_t epoch, std::string what) {
    report.violations.push_back({id, epoch, std::move(what)});
  };
  if (transcript.fingerprint != plan.fingerprint) {
    violation(0, 0, "transcript and plan were produced for different inputs");
    return report;
  }
  const auto& ids = transcript.ids;
  for (const ActorLog& a : transcript.actors) {
    const std::uint32_t planned = plan.epoch_of.at(a.node);
    if (planned != a.epoch) {
      violation(a.id, a.epoch,
                "acted in epoch " + std::to_string(a.epoch) + " but planned for epoch " +
                    std::to_string(planned));
      continue;
    }
    const auto& expected = plan.share(a.node).sleepers;
    if (a.sleepers_at_start != expected)
      violation(a.id, a.epoch,
                "sleeping neighbors at phase start " + join_ids(a.sleepers_at_start, ids) +
                    " differ from S_v " + join_ids(expected, ids));
    if (!a.sleepers_at_end.empty())
      violation(a.id, a.epoch, "missed sleepers " + join_ids(a.sleepers_at_end, ids));
  }
  for (Node v = 0; v < plan.epoch_of.size(); ++v) {
    const bool logged = std::any_of(transcript.actors.begin(), transcript.actors.end(),
                                    [&](const ActorLog& a) { return a.node == v; });
    if (!logged) violation(ids.at(v), plan.epoch_of[v], "planned actor never acted");
  }
  return report;
}

std::string summary_record(const RunTranscript& t) {
  std::ostringstream out;
  out << "n=" << t.n << " alpha=" << t.alpha << " beta=" << t.beta << " seed=" << t.seed
      << " classical=" << t.ledger.classical_total << " quantum=" << t.ledger.quantum_total
      << " rounds=" << t.rounds << " epochs=" << t.epochs_executed
      << " all_awake=" << (t.all_awake ? 1 : 0);
  return out.str();
}

std::string serialize_transcript(const RunTranscript& t) {
  std::ostringstream out;
  out << "summary " << summary_record(t) << " tau=" << t.tau << " fingerprint=" << t.fingerprint
      << '\n';
  out << "ledger wake=" << t.ledger.wake_messages << " proxy=" << t.ledger.proxy_replies << '\n';
  for (const auto& s : t.ledger.rounds)
    out << "rounds " << s.first_round << '+' << s.rounds << " c=" << s.classical_per_round
        << " q=" << s.quantum_per_round << '\n';
  for (std::size_t v = 0; v < t.wake_round.size(); ++v)
    out << "wake " << t.ids.at(v) << ' '
        << (t.wake_round[v] ? std::to_string(*t.wake_round[v]) : std::string("-")) << '\n';
  for (const ActorLog& a : t.actors) {
    out << "actor " << a.id << " epoch=" << a.epoch << " mode=" << to_string(a.mode)
        << " g=" << (a.g ? (*a.g ? "1" : "0") : "-") << " calls=" << a.oracle_calls
        << " q=" << a.quantum << " c=" << a.classical << " rounds=" << a.rounds_used
        << " start=" << join_ids(a.sleepers_at_start, t.ids)
        << " end=" << join_ids(a.sleepers_at_end, t.ids) << " ranges=";
    for (std::size_t j = 0; j < a.ranges.size(); ++j)
      out << (j ? "," : "") << a.ranges[j].lo << '-' << a.ranges[j].hi << ':'
          << a.found_per_range[j];
    out << '\n';
  }
  for (const auto& f : t.flags) out << "flag " << f << '\n';
  return out.str();
}

}  // namespace qwake
