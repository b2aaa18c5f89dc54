#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qwake/qsearch.hpp"
#include "qwake/scheduler.hpp"

namespace qwake::harness {

enum class GraphFamily { clique, random, path, hidden_matching };
enum class WakeRule { single, random_k, all_v };
enum class Algorithm { wakeup, flood };

std::string to_string(GraphFamily f);
std::string to_string(WakeRule w);
std::string to_string(Algorithm a);
GraphFamily parse_family(const std::string& text);
WakeRule parse_wake_rule(const std::string& text);
Algorithm parse_algorithm(const std::string& text);

struct ExperimentConfig {
  GraphFamily family = GraphFamily::clique;
  double edge_probability = 0.1;  // random family only
  Algorithm algorithm = Algorithm::wakeup;
  /// For hidden-matching, n counts the centers; the graph has 2n nodes.
  std::vector<std::size_t> n_values;
  std::vector<int> alpha_values{0};
  WakeRule wake = WakeRule::single;
  std::size_t wake_k = 1;  // random-k only
  std::uint32_t seeds = 10;
  std::uint64_t seed = 1;
  MessageConvention convention = MessageConvention::round_trip;
  double phase_constant = 8.0;
  double budget_constant = 24.0;
  double iterated_constant = 72.0;
  std::uint32_t repetition_factor = 0;
  unsigned threads = 1;
  std::string output;  // CSV path; empty keeps rows in memory only

  WakeupParams wakeup_params() const;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws std::invalid_argument naming the first offending key.
void validate(const ExperimentConfig& config);

/// Line-oriented `key=value` text; `#` starts a comment. Unknown keys are
/// errors. Lists are comma-separated.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string format_config(const ExperimentConfig& config);

struct SweepRow {
  std::string family;
  std::size_t n = 0;
  int alpha = 0;
  int beta = 0;
  std::uint64_t seed = 0;  // cell seed; identical across alpha for matched comparisons
  std::uint64_t classical = 0;
  std::uint64_t quantum = 0;
  std::uint64_t total = 0;
  std::uint64_t rounds = 0;
  std::uint32_t epochs = 0;
  std::uint32_t arad = 0;
  bool success = false;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// family,n,alpha,beta,seed,classical,quantum,total,rounds,epochs,arad,success
std::string csv_header();
std::string format_row(const SweepRow& row);
SweepRow parse_row(const std::string& line);
std::vector<SweepRow> read_csv(std::istream& in);
void write_csv(std::ostream& out, std::vector<SweepRow> rows);
/// Orders by (family, n, alpha, seed).
void sort_rows(std::vector<SweepRow>& rows);

struct Instance {
  PortNetwork network;
  WakeConfig wake;
};

/// Graph and wake set of one cell, drawn from the cell seed.
Instance build_instance(const ExperimentConfig& config, std::size_t n, std::uint64_t seed);

/// Seed for cell (family, n, seed index), independent of alpha.
std::uint64_t cell_seed(const ExperimentConfig& config, std::size_t n, std::uint32_t seed_index);

/// Runs one cell. Failures become rows with success = 0.
SweepRow run_cell(const ExperimentConfig& config, std::size_t n, int alpha,
                  std::uint32_t seed_index);

struct SweepOptions {
  /// Skip cells already present in the output CSV.
  bool resume = false;
  /// Overrides config.threads when nonzero.
  unsigned threads = 0;
};

/// Runs every (n, alpha, seed) cell, appending rows to config.output as they
/// finish and rewriting it in canonical order at the end. Returns the sorted
/// rows, including resumed ones.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const SweepOptions& options = {});

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct ExponentFit {
  std::string family;
  int alpha = 0;
  bool normalized = true;  // y = median / log2 n
  LineFit fit;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<std::pair<std::size_t, double>> medians;  // (n, median total)
};

struct FitOptions {
  bool normalize = true;
  std::size_t min_n_values = 4;
  std::size_t min_seeds = 10;
  std::uint32_t bootstrap = 1000;
  std::uint64_t seed = 7;
};

/// Fits log(median total / log2 n) (or log median total) against log n over
/// the successful rows of (family, alpha). Throws std::invalid_argument on
/// insufficient data.
ExponentFit fit_exponent(const std::vector<SweepRow>& rows, const std::string& family, int alpha,
                         const FitOptions& options = {});

double median(std::vector<double> values);

struct AdviceRatio {
  int alpha_low = 0;
  int alpha_high = 0;
  int beta_low = 0;
  int beta_high = 0;
  std::size_t matched = 0;
  double measured = 0.0;   // median quantum at alpha_low / at alpha_high
  double predicted = 0.0;  // sqrt(2^(beta_high - beta_low))
  bool within_band = false;
};

/// Ratio table over every alpha pair present for (family, n), using only
/// seeds that succeeded at both levels. `band` is the multiplicative
/// tolerance around the prediction. Throws if some pair has no matched seed.
std::vector<AdviceRatio> compare_advice_levels(const std::vector<SweepRow>& rows,
                                               const std::string& family, std::size_t n,
                                               double band = 1.4142135623730951);

std::string format_fit(const ExponentFit& fit);

}  // namespace qwake::harness
