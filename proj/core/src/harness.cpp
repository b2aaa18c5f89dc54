#include "qwake/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "qwake/advice.hpp"
#include "qwake/rng.hpp"

namespace qwake::harness {

namespace {

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) fail("bad value for '" + key + "': '" + text + "'");
  return value;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) fail("bad value for '" + key + "': '" + text + "'");
  return value;
}

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(values[k]);
  }
  return out;
}

std::uint64_t family_tag(GraphFamily f) {
  return static_cast<std::uint64_t>(f) + 1;
}

}  // namespace

std::string to_string(GraphFamily f) {
  switch (f) {
    case GraphFamily::clique: return "clique";
    case GraphFamily::random: return "random";
    case GraphFamily::path: return "path";
    case GraphFamily::hidden_matching: return "hidden-matching";
  }
  return "?";
}

std::string to_string(WakeRule w) {
  switch (w) {
    case WakeRule::single: return "single-node";
    case WakeRule::random_k: return "random-k";
    case WakeRule::all_v: return "all-V";
  }
  return "?";
}

std::string to_string(Algorithm a) { return a == Algorithm::wakeup ? "wakeup" : "flood"; }

GraphFamily parse_family(const std::string& text) {
  for (auto f : {GraphFamily::clique, GraphFamily::random, GraphFamily::path,
                 GraphFamily::hidden_matching})
    if (text == to_string(f)) return f;
  fail("unknown graph family '" + text + "'");
}

WakeRule parse_wake_rule(const std::string& text) {
  for (auto w : {WakeRule::single, WakeRule::random_k, WakeRule::all_v})
    if (text == to_string(w)) return w;
  fail("unknown wake rule '" + text + "'");
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "wakeup") return Algorithm::wakeup;
  if (text == "flood") return Algorithm::flood;
  fail("unknown algorithm '" + text + "'");
}

WakeupParams ExperimentConfig::wakeup_params() const {
  WakeupParams p;
  p.phase_constant = phase_constant;
  p.search.budget_constant = budget_constant;
  p.search.iterated_constant = iterated_constant;
  p.search.repetition_factor = repetition_factor;
  p.search.convention = convention;
  p.keep_round_ledger = false;
  return p;
}

void validate(const ExperimentConfig& c) {
  if (c.n_values.empty()) fail("n: at least one value required");
  for (std::size_t n : c.n_values) {
    if (n < 2) fail("n: values must be at least 2");
    if (c.family == GraphFamily::hidden_matching && n % 2 != 0)
      fail("n: hidden-matching needs even values");
  }
  if (c.alpha_values.empty()) fail("alpha: at least one value required");
  for (int a : c.alpha_values)
    if (a < 0) fail("alpha: values must be nonnegative");
  if (!(c.edge_probability >= 0.0 && c.edge_probability <= 1.0))
    fail("p: must lie in [0, 1]");
  if (c.seeds == 0) fail("seeds: must be positive");
  if (c.wake == WakeRule::all_v && c.family != GraphFamily::hidden_matching)
    fail("wake: all-V only applies to hidden-matching");
  if (c.wake == WakeRule::random_k) {
    if (c.wake_k == 0) fail("k: must be positive");
    for (std::size_t n : c.n_values)
      if (c.wake_k > n) fail("k: exceeds the smallest graph");
  }
  if (!(c.phase_constant > 0)) fail("phase_constant: must be positive");
  if (!(c.budget_constant > 0)) fail("budget_constant: must be positive");
  if (!(c.iterated_constant > 0)) fail("iterated_constant: must be positive");
  if (c.threads == 0) fail("threads: must be positive");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) fail("duplicate config key '" + key + "'");
    if (key == "family") {
      c.family = parse_family(value);
    } else if (key == "p") {
      c.edge_probability = parse_double(key, value);
    } else if (key == "algorithm") {
      c.algorithm = parse_algorithm(value);
    } else if (key == "n") {
      c.n_values.clear();
      for (const auto& item : split(value, ','))
        c.n_values.push_back(parse_number<std::size_t>(key, item));
    } else if (key == "alpha") {
      c.alpha_values.clear();
      for (const auto& item : split(value, ',')) c.alpha_values.push_back(parse_number<int>(key, item));
    } else if (key == "wake") {
      c.wake = parse_wake_rule(value);
    } else if (key == "k") {
      c.wake_k = parse_number<std::size_t>(key, value);
    } else if (key == "seeds") {
      c.seeds = parse_number<std::uint32_t>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "msg_convention") {
      c.convention = parse_message_convention(value);
    } else if (key == "phase_constant") {
      c.phase_constant = parse_double(key, value);
    } else if (key == "budget_constant") {
      c.budget_constant = parse_double(key, value);
    } else if (key == "iterated_constant") {
      c.iterated_constant = parse_double(key, value);
    } else if (key == "repetitions") {
      c.repetition_factor = parse_number<std::uint32_t>(key, value);
    } else if (key == "threads") {
      c.threads = parse_number<unsigned>(key, value);
    } else if (key == "output") {
      c.output = value;
    } else {
      fail("unknown config key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in);
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "family=" << to_string(c.family) << '\n'
      << "p=" << format_double(c.edge_probability) << '\n'
      << "algorithm=" << to_string(c.algorithm) << '\n'
      << "n=" << join(c.n_values) << '\n'
      << "alpha=" << join(c.alpha_values) << '\n'
      << "wake=" << to_string(c.wake) << '\n'
      << "k=" << c.wake_k << '\n'
      << "seeds=" << c.seeds << '\n'
      << "seed=" << c.seed << '\n'
      << "msg_convention=" << to_string(c.convention) << '\n'
      << "phase_constant=" << format_double(c.phase_constant) << '\n'
      << "budget_constant=" << format_double(c.budget_constant) << '\n'
      << "iterated_constant=" << format_double(c.iterated_constant) << '\n'
      << "repetitions=" << c.repetition_factor << '\n'
      << "threads=" << c.threads << '\n';
  if (!c.output.empty()) out << "output=" << c.output << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// CSV

std::string csv_header() {
  return "family,n,alpha,beta,seed,classical,quantum,total,rounds,epochs,arad,success";
}

std::string format_row(const SweepRow& r) {
  std::ostringstream out;
  out << r.family << ',' << r.n << ',' << r.alpha << ',' << r.beta << ',' << r.seed << ','
      << r.classical << ',' << r.quantum << ',' << r.total << ',' << r.rounds << ',' << r.epochs
      << ',' << r.arad << ',' << (r.success ? 1 : 0);
  return out.str();
}

SweepRow parse_row(const std::string& line) {
  const auto f = split(trim(line), ',');
  if (f.size() != 12) fail("CSV row must have 12 fields: " + line);
  SweepRow r;
  r.family = f[0];
  r.n = parse_number<std::size_t>("n", f[1]);
  r.alpha = parse_number<int>("alpha", f[2]);
  r.beta = parse_number<int>("beta", f[3]);
  r.seed = parse_number<std::uint64_t>("seed", f[4]);
  r.classical = parse_number<std::uint64_t>("classical", f[5]);
  r.quantum = parse_number<std::uint64_t>("quantum", f[6]);
  r.total = parse_number<std::uint64_t>("total", f[7]);
  r.rounds = parse_number<std::uint64_t>("rounds", f[8]);
  r.epochs = parse_number<std::uint32_t>("epochs", f[9]);
  r.arad = parse_number<std::uint32_t>("arad", f[10]);
  const int s = parse_number<int>("success", f[11]);
  if (s != 0 && s != 1) fail("success must be 0 or 1");
  r.success = s == 1;
  return r;
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (first && line == csv_header()) {
      first = false;
      continue;
    }
    first = false;
    rows.push_back(parse_row(line));
  }
  return rows;
}

void sort_rows(std::vector<SweepRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return std::tie(a.family, a.n, a.alpha, a.seed) < std::tie(b.family, b.n, b.alpha, b.seed);
  });
}

void write_csv(std::ostream& out, std::vector<SweepRow> rows) {
  sort_rows(rows);
  out << csv_header() << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

// ---------------------------------------------------------------------------
// Sweeps

std::uint64_t cell_seed(const ExperimentConfig& config, std::size_t n, std::uint32_t seed_index) {
  std::uint64_t h = combine_seed(config.seed, family_tag(config.family));
  h = combine_seed(h, n);
  return combine_seed(h, seed_index);
}

Instance build_instance(const ExperimentConfig& c, std::size_t n, std::uint64_t seed) {
  Rng rng(combine_seed(seed, 0x67726170));
  Instance inst;
  switch (c.family) {
    case GraphFamily::clique: inst.network = complete_graph(n, rng.engine()()); break;
    case GraphFamily::random:
      inst.network = random_connected_graph(n, c.edge_probability, rng.engine()());
      break;
    case GraphFamily::path: inst.network = path_graph(n); break;
    case GraphFamily::hidden_matching: {
      Matching m = random_perfect_matching(n, rng.engine()());
      auto h = build_hidden_matching_graph(n, std::move(m), complete_graph(n, rng.engine()()));
      inst.network = std::move(h.network);
      break;
    }
  }
  const std::size_t nodes = inst.network.node_count();
  std::vector<Node> awake;
  switch (c.wake) {
    case WakeRule::single: awake.push_back(static_cast<Node>(rng.uniform_index(nodes))); break;
    case WakeRule::random_k: {
      std::vector<Node> all(nodes);
      for (Node v = 0; v < nodes; ++v) all[v] = v;
      std::shuffle(all.begin(), all.end(), rng.engine());
      awake.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(c.wake_k));
      break;
    }
    case WakeRule::all_v:
      for (Node v = 0; v < nodes / 2; ++v) awake.push_back(v);
      break;
  }
  inst.wake = WakeConfig(std::move(awake), nodes);
  return inst;
}

SweepRow run_cell(const ExperimentConfig& config, std::size_t n, int alpha,
                  std::uint32_t seed_index) {
  SweepRow row;
  row.family = to_string(config.family);
  row.n = n;
  row.alpha = alpha;
  row.beta = beta(alpha);
  row.seed = cell_seed(config, n, seed_index);
  try {
    const Instance inst = build_instance(config, n, row.seed);
    row.arad = awake_distance(inst.network, inst.wake);
    RunTranscript t;
    if (config.algorithm == Algorithm::flood) {
      t = baseline_flood(inst.network, inst.wake);
    } else {
      t = run_with_oracle(inst.network, inst.wake, alpha, config.wakeup_params(),
                          combine_seed(row.seed, 0x72756e));
    }
    row.classical = t.ledger.classical_total;
    row.quantum = t.ledger.quantum_total;
    row.total = t.ledger.total();
    row.rounds = t.rounds;
    row.epochs = t.epochs_executed;
    row.success = t.all_awake;
  } catch (const std::exception&) {
    row.success = false;
  }
  return row;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const SweepOptions& options) {
  validate(config);
  struct Cell {
    std::size_t n;
    int alpha;
    std::uint32_t seed_index;
  };
  using Key = std::tuple<std::size_t, int, std::uint64_t>;
  const std::string family = to_string(config.family);

  std::vector<SweepRow> rows;
  std::set<Key> done;
  if (options.resume && !config.output.empty() && std::filesystem::exists(config.output)) {
    std::ifstream in(config.output);
    for (auto& r : read_csv(in)) {
      if (r.family != family) continue;
      if (done.insert({r.n, r.alpha, r.seed}).second) rows.push_back(std::move(r));
    }
  }

  std::vector<Cell> cells;
  for (std::size_t n : config.n_values)
    for (int alpha : config.alpha_values)
      for (std::uint32_t s = 0; s < config.seeds; ++s)
        if (!done.contains({n, alpha, cell_seed(config, n, s)})) cells.push_back({n, alpha, s});

  std::ofstream out;
  if (!config.output.empty()) {
    const bool append = options.resume && !rows.empty();
    out.open(config.output, append ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + config.output);
    if (!append) out << csv_header() << '\n' << std::flush;
  }

  std::mutex writer;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= cells.size()) return;
      SweepRow row = run_cell(config, cells[k].n, cells[k].alpha, cells[k].seed_index);
      std::lock_guard lock(writer);
      if (out.is_open()) out << format_row(row) << '\n' << std::flush;
      rows.push_back(std::move(row));
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(options.threads ? options.threads : config.threads,
                                      static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1))));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  sort_rows(rows);
  if (out.is_open()) {
    out.close();
    std::ofstream canonical(config.output, std::ios::trunc);
    write_csv(canonical, rows);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Fitting

double median(std::vector<double> values) {
  if (values.empty()) fail("median of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail("least squares needs at least two points");
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) fail("least squares needs distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

ExponentFit fit_exponent(const std::vector<SweepRow>& rows, const std::string& family, int alpha,
                         const FitOptions& options) {
  std::map<std::size_t, std::vector<double>> by_n;
  for (const auto& r : rows)
    if (r.family == family && r.alpha == alpha && r.success)
      by_n[r.n].push_back(static_cast<double>(r.total));
  std::erase_if(by_n, [&](const auto& kv) { return kv.second.size() < options.min_seeds; });
  if (by_n.size() < options.min_n_values)
    fail("fit needs " + std::to_string(options.min_n_values) + " n values with at least " +
         std::to_string(options.min_seeds) + " successful seeds; have " +
         std::to_string(by_n.size()));

  auto point = [&](std::size_t n, double med) {
    const double y = options.normalize ? med / log_factor(n) : med;
    return std::log(y);
  };

  ExponentFit out;
  out.family = family;
  out.alpha = alpha;
  out.normalized = options.normalize;
  std::vector<double> x, y;
  for (const auto& [n, values] : by_n) {
    const double med = median(values);
    out.medians.emplace_back(n, med);
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(point(n, med));
  }
  out.fit = least_squares(x, y);

  if (options.bootstrap > 0) {
    Rng rng(options.seed);
    std::vector<double> slopes;
    slopes.reserve(options.bootstrap);
    for (std::uint32_t b = 0; b < options.bootstrap; ++b) {
      std::vector<double> yb;
      for (const auto& [n, values] : by_n) {
        std::vector<double> sample(values.size());
        for (auto& s : sample) s = values[rng.uniform_index(values.size())];
        yb.push_back(point(n, median(std::move(sample))));
      }
      slopes.push_back(least_squares(x, yb).slope);
    }
    std::sort(slopes.begin(), slopes.end());
    auto pct = [&](double q) {
      const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(slopes.size() - 1)));
      return slopes[k];
    };
    out.ci_low = pct(0.025);
    out.ci_high = pct(0.975);
  } else {
    out.ci_low = out.ci_high = out.fit.slope;
  }
  return out;
}

std::vector<AdviceRatio> compare_advice_levels(const std::vector<SweepRow>& rows,
                                               const std::string& family, std::size_t n,
                                               double band) {
  std::map<int, std::map<std::uint64_t, double>> by_alpha;
  for (const auto& r : rows)
    if (r.family == family && r.n == n && r.success)
      by_alpha[r.alpha][r.seed] = static_cast<double>(r.quantum);
  std::vector<AdviceRatio> out;
  for (auto lo = by_alpha.begin(); lo != by_alpha.end(); ++lo)
    for (auto hi = std::next(lo); hi != by_alpha.end(); ++hi) {
      std::vector<double> a, b;
      for (const auto& [seed, q] : lo->second)
        if (auto it = hi->second.find(seed); it != hi->second.end()) {
          a.push_back(q);
          b.push_back(it->second);
        }
      if (a.empty())
        fail("no matched seeds between alpha=" + std::to_string(lo->first) +
             " and alpha=" + std::to_string(hi->first));
      AdviceRatio r;
      r.alpha_low = lo->first;
      r.alpha_high = hi->first;
      r.beta_low = beta(lo->first);
      r.beta_high = beta(hi->first);
      r.matched = a.size();
      const double denom = median(b);
      r.measured = denom > 0 ? median(a) / denom : std::numeric_limits<double>::infinity();
      r.predicted = std::sqrt(std::exp2(r.beta_high - r.beta_low));
      r.within_band = r.measured >= r.predicted / band && r.measured <= r.predicted * band;
      out.push_back(r);
    }
  if (out.empty()) fail("advice comparison needs at least two alpha values");
  return out;
}

std::string format_fit(const ExponentFit& f) {
  std::ostringstream out;
  out.precision(6);
  out << "family=" << f.family << " alpha=" << f.alpha
      << " fit=" << (f.normalized ? "normalized" : "raw") << " slope=" << f.fit.slope
      << " intercept=" << f.fit.intercept << " r2=" << f.fit.r2 << " ci95=[" << f.ci_low << ", "
      << f.ci_high << "] points=" << f.medians.size();
  return out.str();
}

}  // namespace qwake::harness
