#include "pbf/cli.hpp"

#include "pbf/csv_io.hpp"
#include "pbf/errors.hpp"
#include "pbf/harness.hpp"
#include "pbf/permute.hpp"
#include "pbf/rng.hpp"
#include "pbf/simgen.hpp"
#include "pbf/spectrum.hpp"
#include "pbf/stats_util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

namespace pbf {

namespace {

using nlohmann::json;

struct InputFlags {
  std::string x;
  std::string y;
  std::string input;
  std::string repr = "grid";
  std::string grid;
  std::string rule = "trapezoid";
  std::string header = "auto";
  std::string label_col;
  std::string first_group;
};

void add_input_flags(CLI::App& cmd, InputFlags& f) {
  cmd.add_option("--x", f.x, "CSV with the first sample, one curve per row");
  cmd.add_option("--y", f.y, "CSV with the second sample");
  cmd.add_option("--input", f.input, "Single CSV whose label column splits the two samples");
  cmd.add_option("--repr", f.repr, "Curve representation: grid | coeff")->capture_default_str();
  cmd.add_option("--grid", f.grid, "File with grid abscissae (overrides a header row)");
  cmd.add_option("--rule", f.rule, "Quadrature rule: trapezoid | riemann-left")
      ->capture_default_str();
  cmd.add_option("--header", f.header, "Header row: auto | yes | no")->capture_default_str();
  cmd.add_option("--label-col", f.label_col, "Label column by header name or 0-based index");
  cmd.add_option("--first-group", f.first_group, "Tag of the first sample in --input");
}

CsvOptions csv_options(const InputFlags& f) {
  CsvOptions o;
  o.repr = parse_representation(f.repr);
  o.rule = parse_quadrature(f.rule);
  o.header = parse_header_mode(f.header);
  if (!f.grid.empty()) o.grid_points = read_grid_file(f.grid);
  if (!f.label_col.empty()) o.label_column = f.label_col;
  if (!f.first_group.empty()) o.first_group = f.first_group;
  return o;
}

IngestResult ingest(const InputFlags& f) {
  const CsvOptions o = csv_options(f);
  if (!f.input.empty()) {
    if (!f.x.empty() || !f.y.empty()) throw InvalidArgument("use either --input or --x/--y");
    return ingest_csv(f.input, o);
  }
  if (f.x.empty() || f.y.empty()) throw InvalidArgument("need --x and --y, or --input");
  return ingest_csv_pair(f.x, f.y, o);
}

std::uint64_t effective_seed(const CLI::Option* opt, std::uint64_t given, std::ostream& err) {
  std::uint64_t seed = given;
  if (opt->count() == 0) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  err << "seed: " << seed << '\n';
  return seed;
}

json result_json(const TestResult& r, double alpha, std::size_t dropped) {
  json j{{"zeta_hat", r.zeta_hat},
         {"scaled", r.scaled},
         {"p_value", r.p_value},
         {"alpha", alpha},
         {"reject", r.p_value <= alpha},
         {"B", r.b_used},
         {"mode", to_string(r.mode)},
         {"phi", to_string(r.phi)},
         {"n", r.n},
         {"m", r.m},
         {"seed", r.seed},
         {"dropped_rows", dropped}};
  if (r.replicate_stats) j["replicate_stats"] = *r.replicate_stats;
  return j;
}

json power_json(const std::vector<SweepRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    const auto& c = row.estimate.config;
    for (const auto& p : row.estimate.per_phi)
      out.push_back({{"scenario", c.scenario},
                     {"param", row.parameter},
                     {"value", row.value},
                     {"phi", to_string(p.phi)},
                     {"reps", row.estimate.reps_done},
                     {"rejections", p.rejections},
                     {"rate", p.rate},
                     {"stderr", p.stderr_},
                     {"seed", c.seed},
                     {"n", c.n},
                     {"m", c.m},
                     {"B", c.b},
                     {"alpha", c.alpha}});
  }
  return out;
}

// Scenario flags are kept as text and applied after the config file, so any
// flag given on the command line overrides the file.
struct ScenarioFlags {
  std::string config_file;
  std::map<std::string, std::string> raw;
  bool normalized_cos = false;
};

void add_scenario_flags(CLI::App& cmd, ScenarioFlags& f, bool with_test_keys) {
  cmd.add_option("--config", f.config_file, "key=value scenario file; flags override it");
  const auto key = [&](const std::string& flag, const std::string& name, const std::string& help) {
    cmd.add_option(flag, f.raw[name], help);
  };
  key("--scenario", "scenario", "Scenario ex1 .. ex9");
  key("--n", "n", "First sample size");
  key("--m", "m", "Second sample size");
  key("--r", "r", "Mean amplitude (ex4)");
  key("--sigma", "sigma", "Scale (ex5)");
  key("--d", "d", "Number of frequencies (ex6, ex7)");
  key("--delta", "delta", "Contamination level (ex7 .. ex9)");
  key("--variant", "variant", "Scenario variant i | ii (ex4 .. ex6)");
  key("--grid-points", "grid_points", "Grid size for Wiener scenarios");
  key("--threads", "threads", "Worker threads, 0 = all cores");
  if (with_test_keys) {
    key("--B", "B", "Random permutations per test");
    key("--alpha", "alpha", "Nominal level");
    key("--reps", "reps", "Replications");
    key("--phi", "phi", "Kernels: comma list of l2, exp, log, or all");
  }
  cmd.add_flag("--normalized-cos", f.normalized_cos, "Give the cos family unit-norm basis functions");
}

ScenarioConfig scenario_config(CLI::App& cmd, const ScenarioFlags& f) {
  ScenarioConfig c;
  if (!f.config_file.empty()) apply_config_file(c, f.config_file);
  for (const auto& [name, value] : f.raw) {
    const std::string flag = name == "grid_points" ? "--grid-points" : "--" + name;
    if (cmd.count(flag) > 0) set_config_value(c, name, value);
  }
  if (f.normalized_cos) c.normalized_cos = true;
  return c;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw InvalidArgument("--values: '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

void progress_line(std::ostream& err, std::size_t done, std::size_t total) {
  if (done == total || done % 50 == 0) err << "replication " << done << '/' << total << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Projected energy-distance two-sample test for functional data", "pbf"};
  app.require_subcommand(1);

  // test
  auto* test = app.add_subcommand("test", "Permutation test on two samples of curves");
  InputFlags test_in;
  std::string test_phi = "l2";
  std::size_t test_b = 500;
  double test_alpha = 0.05;
  std::uint64_t test_seed = 0;
  bool keep = false;
  unsigned test_threads = 1;
  add_input_flags(*test, test_in);
  test->add_option("--phi", test_phi, "Kernel: l2 | exp | log")->capture_default_str();
  test->add_option("--B", test_b, "Random permutations")->capture_default_str();
  test->add_option("--alpha", test_alpha, "Level used for the reject field")->capture_default_str();
  auto* test_seed_opt = test->add_option("--seed", test_seed, "Seed (random when omitted)");
  test->add_flag("--keep-replicates", keep, "Include the permuted statistics in the output");
  test->add_option("--threads", test_threads, "Worker threads, 0 = all cores")
      ->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Write a generated two-sample data set as CSV");
  ScenarioFlags sim_flags;
  std::size_t sim_count = 0;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  add_scenario_flags(*simulate, sim_flags, false);
  simulate->add_option("--count", sim_count, "Curves per sample (sets n and m)");
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Seed (random when omitted)");
  simulate->add_option("--out", sim_out, "Output file (stdout when omitted)");

  // power
  auto* power = app.add_subcommand("power", "Monte Carlo rejection rate of one scenario");
  ScenarioFlags pow_flags;
  std::uint64_t pow_seed = 0;
  std::string pow_ledger;
  bool pow_json = false;
  add_scenario_flags(*power, pow_flags, true);
  auto* pow_seed_opt = power->add_option("--seed", pow_seed, "Seed (random when omitted)");
  power->add_option("--ledger", pow_ledger, "Append result rows to this CSV file");
  power->add_flag("--json", pow_json, "Print JSON instead of CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Rejection rates over a list of parameter values");
  ScenarioFlags sw_flags;
  std::uint64_t sw_seed = 0;
  std::string sw_ledger;
  std::string sw_param;
  std::string sw_values;
  bool sw_json = false;
  add_scenario_flags(*sweep, sw_flags, true);
  auto* sw_seed_opt = sweep->add_option("--seed", sw_seed, "Seed (random when omitted)");
  sweep->add_option("--param", sw_param, "Parameter: r, sigma, d, delta, n, m, nm or alpha")
      ->required();
  sweep->add_option("--values", sw_values, "Comma-separated values")->required();
  sweep->add_option("--ledger", sw_ledger, "Append result rows to this CSV file");
  sweep->add_flag("--json", sw_json, "Print JSON instead of CSV");

  // spectrum
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues and limit-law quantiles");
  InputFlags spec_in;
  std::string spec_phi = "l2";
  std::size_t spec_draws = 100000;
  std::uint64_t spec_seed = 0;
  unsigned spec_threads = 1;
  add_input_flags(*spectrum, spec_in);
  spectrum->add_option("--phi", spec_phi, "Kernel: l2 | exp | log")->capture_default_str();
  spectrum->add_option("--draws", spec_draws, "Monte Carlo draws of the limit law")
      ->capture_default_str();
  auto* spec_seed_opt = spectrum->add_option("--seed", spec_seed, "Seed (random when omitted)");
  spectrum->add_option("--threads", spec_threads, "Worker threads, 0 = all cores")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (test->parsed()) {
      const PhiKind kind = parse_phi(test_phi);
      if (!(test_alpha > 0.0 && test_alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
      const std::uint64_t seed = effective_seed(test_seed_opt, test_seed, err);
      const IngestResult data = ingest(test_in);
      if (data.dropped_count > 0) err << "dropped rows with missing values: " << data.dropped_count << '\n';
      PermutationOptions opts;
      opts.threads = test_threads;
      opts.keep_replicates = keep;
      const TestResult r = permutation_test(data.sample, kind, test_b, seed, opts);
      out << result_json(r, test_alpha, data.dropped_count).dump(2) << '\n';
    } else if (simulate->parsed()) {
      ScenarioConfig c = scenario_config(*simulate, sim_flags);
      if (sim_count > 0) c.n = c.m = sim_count;
      c.seed = effective_seed(sim_seed_opt, sim_seed, err);
      const FunctionalSample sample = draw_scenario(c, 0);
      if (sim_out.empty()) {
        write_curves_csv(out, sample);
      } else {
        std::ofstream file(sim_out);
        if (!file) throw DataError("cannot write '" + sim_out + "'");
        write_curves_csv(file, sample);
      }
    } else if (power->parsed() || sweep->parsed()) {
      const bool is_sweep = sweep->parsed();
      CLI::App& cmd = is_sweep ? *sweep : *power;
      ScenarioConfig c = scenario_config(cmd, is_sweep ? sw_flags : pow_flags);
      c.seed = is_sweep ? effective_seed(sw_seed_opt, sw_seed, err)
                        : effective_seed(pow_seed_opt, pow_seed, err);
      validate(c);
      const ProgressFn progress = [&err](std::size_t done, std::size_t total) {
        progress_line(err, done, total);
      };
      std::vector<SweepRow> rows;
      if (is_sweep) {
        rows = run_sweep(c, sw_param, parse_values(sw_values), progress);
      } else {
        const std::string param = primary_parameter(c);
        rows.push_back(SweepRow{param, parameter_value(c, param), run_power(c, progress)});
      }
      const std::string& ledger = is_sweep ? sw_ledger : pow_ledger;
      if (!ledger.empty()) append_ledger(ledger, rows);
      if (is_sweep ? sw_json : pow_json) {
        out << power_json(rows).dump(2) << '\n';
      } else {
        write_ledger_header(out);
        for (const auto& row : rows) write_ledger_rows(out, row);
      }
    } else if (spectrum->parsed()) {
      const PhiKind kind = parse_phi(spec_phi);
      if (spec_draws == 0) throw InvalidArgument("--draws must be >= 1");
      const std::uint64_t seed = effective_seed(spec_seed_opt, spec_seed, err);
      const IngestResult data = ingest(spec_in);
      const GramMatrix g = gram(data.sample, spec_threads);
      const double ratio = static_cast<double>(data.sample.n()) /
                           static_cast<double>(data.sample.size());
      const KernelSpectrum spec = spectrum_estimate(g, kind, ratio);
      const std::vector<double> draws = sample_limit_law(spec, spec_draws, seed, {}, spec_threads);
      std::ostringstream table;
      table.precision(12);
      table << "table,key,value\n";
      table << "meta,phi," << to_string(kind) << '\n';
      table << "meta,n_used," << spec.n_used << '\n';
      table << "meta,seed," << seed << '\n';
      for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k)
        table << "eigenvalue," << (k + 1) << ',' << spec.eigenvalues[k] << '\n';
      for (double p : {0.5, 0.9, 0.95, 0.99})
        table << "quantile," << p << ',' << quantile(draws, p) << '\n';
      out << table.str();
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace pbf
