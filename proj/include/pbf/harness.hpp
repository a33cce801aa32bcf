#pragma once

#include "pbf/curves.hpp"
#include "pbf/permute.hpp"
#include "pbf/simgen.hpp"
#include "pbf/statistic.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pbf {

/// One simulation scenario. `scenario` is ex1 .. ex9; r, sigma, d, delta and
/// variant bind the scenario parameters (unused ones are ignored).
struct ScenarioConfig {
  std::string scenario = "ex1";
  std::size_t n = 20;
  std::size_t m = 20;
  std::size_t b = 300;
  double alpha = 0.05;
  std::size_t reps = 400;
  std::vector<PhiKind> phis{PhiKind::L2, PhiKind::Exp, PhiKind::Log};
  std::uint64_t seed = 1;

  double r = 1.0;        // ex4 mean amplitude
  double sigma = 2.0;    // ex5 scale
  std::size_t d = 81;    // ex6 / ex7 number of frequencies
  double delta = 1.0;    // ex7 .. ex9 contamination level
  std::string variant = "i";  // ex4 .. ex6: i or ii
  std::size_t grid_points = 101;
  bool normalized_cos = false;
  unsigned threads = 1;
};

/// Throws InvalidArgument on an unknown scenario, bad sizes, alpha or reps.
void validate(const ScenarioConfig& config);

/// Sets one key (scenario, n, m, B, alpha, reps, phi, seed, r, sigma, d,
/// delta, variant, grid_points, normalized_cos, threads). `phi` takes a
/// comma-separated list.
void set_config_value(ScenarioConfig& config, std::string_view key, std::string_view value);

/// Flat key=value lines; blank lines and lines starting with # are skipped.
void apply_config_text(ScenarioConfig& config, std::istream& in);
void apply_config_file(ScenarioConfig& config, const std::string& path);

/// Parameter that the scenario varies along its figure axis (r, sigma, d,
/// delta) or "n" for the null scenarios.
std::string primary_parameter(const ScenarioConfig& config);
double parameter_value(const ScenarioConfig& config, std::string_view parameter);

struct ScenarioLaws {
  GeneratorSpec x;
  GeneratorSpec y;
};

ScenarioLaws build_scenario(const ScenarioConfig& config);

/// Seed of replication `rep`: depends only on (config.seed, rep).
std::uint64_t replication_seed(std::uint64_t seed, std::size_t rep);

/// Pooled sample of replication `rep`.
FunctionalSample draw_scenario(const ScenarioConfig& config, std::size_t rep);

struct ReplicationOutcome {
  std::vector<TestResult> results;  // one per config.phis entry
  std::vector<bool> rejected;
};

/// Draws the data of replication `rep` and runs the permutation test for
/// every kernel. Bit-identical when rerun in isolation.
ReplicationOutcome run_replication(const ScenarioConfig& config, std::size_t rep);

struct PhiPower {
  PhiKind phi = PhiKind::L2;
  std::size_t rejections = 0;
  double rate = 0.0;
  double stderr_ = 0.0;
};

struct PowerEstimate {
  ScenarioConfig config;
  std::size_t reps_done = 0;
  std::vector<PhiPower> per_phi;

  const PhiPower& at(PhiKind kind) const;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

PowerEstimate run_power(const ScenarioConfig& config, const ProgressFn& progress = {});

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  PowerEstimate estimate;
};

/// One run_power per value of `parameter` (r, sigma, d, delta, n, m, or n=m
/// via "nm").
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::string& parameter,
                                const std::vector<double>& values,
                                const ProgressFn& progress = {});

/// Power on random sub-samples of a fixed two-sample data set: each
/// replication draws round(pooled_size * proportion) curves from the first
/// group and the rest from the second, without replacement. Uses b, alpha,
/// reps, phis, seed and threads from `config`.
PowerEstimate run_subsample_power(const FunctionalSample& data, std::size_t pooled_size,
                                  double proportion, const ScenarioConfig& config,
                                  const ProgressFn& progress = {});

/// Ledger columns: scenario,param,value,phi,reps,rejections,rate,stderr,seed
void write_ledger_header(std::ostream& out);
void write_ledger_rows(std::ostream& out, const SweepRow& row);
/// Appends rows to a CSV file, writing the header when the file is new or empty.
void append_ledger(const std::string& path, const std::vector<SweepRow>& rows);

}  // namespace pbf
