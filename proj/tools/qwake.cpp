#include <CLI/CLI.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qwake/harness.hpp"
#include "qwake/lowerbound.hpp"
#include "qwake/scheduler.hpp"

using namespace qwake;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("QWAKE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring malformed QWAKE_SEED '" << env << "'\n";
    }
  }
  return 1;
}

const std::map<std::string, MessageConvention> kConventions{
    {"roundtrip2", MessageConvention::round_trip}, {"single1", MessageConvention::single}};

struct RunArgs {
  std::string family = "clique";
  std::string graph_file;
  std::size_t n = 32;
  double p = 0.1;
  int alpha = 0;
  std::string wake = "single-node";
  std::size_t wake_k = 1;
  std::uint64_t seed = default_seed();
  bool flood = false;
  double phase_constant = 8.0;
  std::string transcript;
  std::string log;
};

int cmd_run(const RunArgs& a, MessageConvention convention) {
  harness::ExperimentConfig c;
  c.family = harness::parse_family(a.family);
  c.edge_probability = a.p;
  c.wake = harness::parse_wake_rule(a.wake);
  c.wake_k = a.wake_k;
  c.convention = convention;
  c.phase_constant = a.phase_constant;

  harness::Instance inst;
  if (!a.graph_file.empty()) {
    std::ifstream in(a.graph_file);
    if (!in) throw std::runtime_error("cannot open " + a.graph_file);
    inst.network = read_graph(in);
    Rng rng(combine_seed(a.seed, 0x67726170));
    inst.wake = WakeConfig({static_cast<Node>(rng.uniform_index(inst.network.node_count()))},
                           inst.network.node_count());
  } else {
    inst = harness::build_instance(c, a.n, a.seed);
  }

  std::ofstream log_file;
  WakeupParams params = c.wakeup_params();
  if (!a.log.empty()) {
    log_file.open(a.log);
    params.log = &log_file;
  }
  const RunTranscript t = a.flood ? baseline_flood(inst.network, inst.wake)
                                  : run_with_oracle(inst.network, inst.wake, a.alpha, params, a.seed);
  std::cout << summary_record(t) << '\n';
  for (const auto& flag : t.flags) std::cout << "flag: " << flag << '\n';
  if (!a.transcript.empty()) std::ofstream(a.transcript) << serialize_transcript(t);
  return t.all_awake ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& output, unsigned threads,
              bool resume, std::optional<MessageConvention> convention) {
  auto c = harness::load_config(config_path);
  if (!output.empty()) c.output = output;
  if (convention) c.convention = *convention;
  const auto rows = harness::run_sweep(c, {.resume = resume, .threads = threads});
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.success ? 0 : 1;
  std::cout << rows.size() << " rows, " << failed << " failed";
  if (!c.output.empty()) std::cout << ", written to " << c.output;
  std::cout << '\n';
  if (c.output.empty()) harness::write_csv(std::cout, rows);
  return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& family, std::vector<int> alphas,
            bool raw, std::uint32_t bootstrap, std::size_t compare_n) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  const auto rows = harness::read_csv(in);
  if (alphas.empty()) {
    std::set<int> present;
    for (const auto& r : rows)
      if (r.family == family) present.insert(r.alpha);
    alphas.assign(present.begin(), present.end());
  }
  for (int alpha : alphas) {
    const auto fit = harness::fit_exponent(rows, family, alpha,
                                           {.normalize = !raw, .bootstrap = bootstrap});
    std::cout << harness::format_fit(fit) << '\n';
  }
  if (compare_n > 0)
    for (const auto& r : harness::compare_advice_levels(rows, family, compare_n))
      std::cout << "alpha " << r.alpha_low << " vs " << r.alpha_high << ": measured " << r.measured
                << ", predicted " << r.predicted << " over " << r.matched << " seeds"
                << (r.within_band ? "" : " (outside band)") << '\n';
  return 0;
}

int cmd_reduce(std::size_t n, std::uint64_t matching_seed, int alpha, std::uint64_t seed,
               std::uint32_t runs, MessageConvention convention) {
  const Matching m = random_perfect_matching(n, matching_seed);
  WakeupParams params;
  params.search.convention = convention;
  int bad = 0;
  for (std::uint32_t k = 0; k < runs; ++k) {
    const auto r = lb::end_to_end_reduction_check(n, m, alpha, params, combine_seed(seed, k));
    std::cout << lb::format_report(r) << '\n';
    bad += r.run_success && !r.descriptor_correct ? 1 : 0;
  }
  return bad == 0 ? 0 : 1;
}

void print_state(const lb::RegisterLayout& layout, const HiddenMatchingInstance& inst,
                 const lb::SparseQuantumState& s) {
  for (const auto& [basis, amp] : s.amplitudes) {
    std::cout << "  " << amp.real() << " |";
    for (Port j = 1; j <= layout.degree(inst.v(1)); ++j) {
      const auto t = basis[layout.psend(inst.v(1), j)];
      if (t != lb::vacuum) std::cout << " psend" << j << "=m" << lb::payload(t);
    }
    for (std::uint32_t t = 1; t <= layout.mu(); ++t)
      if (basis[layout.outbox_i(t)] != 0)
        std::cout << " outbox" << t << "=(" << basis[layout.outbox_i(t)] << ','
                  << basis[layout.outbox_j(t)] << ')';
    for (Node u = 0; u < layout.nodes(); ++u) {
      const auto t = basis[layout.receive(u, inst.v(1))];
      if (t != lb::vacuum) std::cout << " m" << lb::payload(t) << "@id" << inst.network.id(u);
    }
    std::cout << " B=" << basis[layout.reg_b()] << " >\n";
  }
}

int cmd_routing_demo(std::uint64_t seed, bool sleeping_pendant) {
  constexpr std::size_t n = 6;
  const auto inst = build_hidden_matching_graph(n, random_perfect_matching(n, seed),
                                                complete_graph(n, combine_seed(seed, 1)));
  const lb::RegisterLayout layout(inst.network, 2);
  const double half = 1.0 / std::sqrt(2.0);
  const auto m = [](int k) { return lb::make_token(k, false); };
  const std::vector<lb::Branch> branches{
      {half, {}, {{inst.v(1), 1, m(1)}, {inst.v(1), 2, m(2)}}},
      {half, {}, {{inst.v(1), 3, m(3)}, {inst.v(1), 4, m(4)}}}};
  std::vector<bool> asleep(2 * n, false);
  asleep[inst.w(1)] = sleeping_pendant;

  std::cout << "v1 is matched to v" << inst.matching[0] << "; its ports lead to";
  for (Port j = 1; j < n; ++j) std::cout << ' ' << j << ":v" << inst.clique_partner(1, j);
  std::cout << "\nprepared:\n";
  const auto state = lb::prepare_round(layout, branches);
  print_state(layout, inst, state);
  lb::PermutationOracle oracle(inst.matching);
  const auto out = lb::simulate_routing_round(layout, state, oracle, inst.clique, asleep);
  std::cout << "delivered:\n";
  print_state(layout, inst, out.state);
  std::cout << "queries: " << out.queries_used << '\n';
  return out.queries_used == 4 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum wake-up simulator"};
  app.require_subcommand(1);
  std::string convention_name = "roundtrip2";
  app.add_option("--msg-convention", convention_name, "Quantum messages per oracle call")
      ->check(CLI::IsMember({"roundtrip2", "single1"}));

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one instance and print its summary");
  run_cmd->add_option("--family", run.family, "clique, random, path or hidden-matching");
  run_cmd->add_option("--graph", run.graph_file, "Read the network from a graph file")->check(CLI::ExistingFile);
  run_cmd->add_option("-n", run.n, "Number of nodes")->check(CLI::Range(2, 1 << 20));
  run_cmd->add_option("-p", run.p, "Edge probability for random graphs");
  run_cmd->add_option("--alpha", run.alpha, "Advice bits per node")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--wake", run.wake, "single-node, random-k or all-V");
  run_cmd->add_option("-k", run.wake_k, "Awake nodes for random-k");
  run_cmd->add_option("--seed", run.seed, "Seed (default: $QWAKE_SEED or 1)");
  run_cmd->add_option("--phase-constant", run.phase_constant, "Rounds per phase over n log2 n");
  run_cmd->add_flag("--flood", run.flood, "Run classical flooding instead");
  run_cmd->add_option("--transcript", run.transcript, "Write the full transcript here");
  run_cmd->add_option("--log", run.log, "Write the event log here");

  std::string config_path, sweep_out;
  unsigned threads = 0;
  bool resume = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a sweep described by a config file");
  sweep_cmd->add_option("config", config_path, "key=value config file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("-o,--output", sweep_out, "CSV path (overrides the config)");
  sweep_cmd->add_option("-j,--threads", threads, "Worker threads (overrides the config)");
  sweep_cmd->add_flag("--resume", resume, "Skip cells already in the CSV");

  std::string csv_path, fit_family = "clique";
  std::vector<int> fit_alphas;
  bool raw = false;
  std::uint32_t bootstrap = 1000;
  std::size_t compare_n = 0;
  auto* fit_cmd = app.add_subcommand("fit", "Fit scaling exponents to a sweep CSV");
  fit_cmd->add_option("csv", csv_path, "Sweep CSV")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--family", fit_family, "Graph family to fit");
  fit_cmd->add_option("--alpha", fit_alphas, "Advice levels (default: all present)");
  fit_cmd->add_flag("--raw", raw, "Fit raw totals instead of totals over log2 n");
  fit_cmd->add_option("--bootstrap", bootstrap, "Bootstrap resamples for the interval");
  fit_cmd->add_option("--compare", compare_n, "Also print advice ratios at this n");

  std::size_t reduce_n = 8;
  std::uint64_t matching_seed = 1, reduce_seed = default_seed();
  int reduce_alpha = 0;
  std::uint32_t runs = 1;
  auto* reduce_cmd = app.add_subcommand("reduce", "Solve a hidden matching via wake-up");
  reduce_cmd->add_option("-n", reduce_n, "Centers (even)")->check(CLI::Range(2, 4096));
  reduce_cmd->add_option("--matching-seed", matching_seed, "Seed of the hidden matching");
  reduce_cmd->add_option("--alpha", reduce_alpha, "Advice bits per node")->check(CLI::NonNegativeNumber);
  reduce_cmd->add_option("--seed", reduce_seed, "Run seed (default: $QWAKE_SEED or 1)");
  reduce_cmd->add_option("--runs", runs, "Independent runs");

  std::uint64_t demo_seed = 3;
  bool sleeping = false;
  auto* demo_cmd = app.add_subcommand("routing-demo", "Route a two-branch round from a four-port center");
  demo_cmd->add_option("--seed", demo_seed, "Seed for the matching and ports");
  demo_cmd->add_flag("--sleeping-pendant", sleeping, "Put w1 to sleep");

  CLI11_PARSE(app, argc, argv);
  const MessageConvention convention = kConventions.at(convention_name);
  const bool convention_given = app.count("--msg-convention") > 0;

  try {
    if (*run_cmd) return cmd_run(run, convention);
    if (*sweep_cmd)
      return cmd_sweep(config_path, sweep_out, threads, resume,
                       convention_given ? std::optional(convention) : std::nullopt);
    if (*fit_cmd) return cmd_fit(csv_path, fit_family, fit_alphas, raw, bootstrap, compare_n);
    if (*reduce_cmd) return cmd_reduce(reduce_n, matching_seed, reduce_alpha, reduce_seed, runs, convention);
    if (*demo_cmd) return cmd_routing_demo(demo_seed, sleeping);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
