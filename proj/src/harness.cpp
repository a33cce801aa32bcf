#include "pbf/harness.hpp"

#include "pbf/errors.hpp"
#include "pbf/parallel.hpp"
#include "pbf/rng.hpp"
#include "pbf/stats_util.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>

namespace pbf {

namespace {

constexpr std::string_view kScenarios[] = {"ex1", "ex2", "ex3", "ex4", "ex5",
                                           "ex6", "ex7", "ex8", "ex9"};

std::string trimmed(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
T parse_integer(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InvalidArgument(std::string(key) + ": '" + std::string(text) + "' is not an integer");
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    throw InvalidArgument(std::string(key) + ": '" + std::string(text) + "' is not a number");
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw InvalidArgument(std::string(key) + ": expected true or false");
}

std::vector<PhiKind> parse_phi_list(std::string_view text) {
  std::vector<PhiKind> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trimmed(text.substr(start, comma == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : comma - start));
    if (item == "all") {
      out.assign(std::begin(kAllPhis), std::end(kAllPhis));
    } else if (!item.empty()) {
      const PhiKind kind = parse_phi(item);
      if (std::find(out.begin(), out.end(), kind) == out.end()) out.push_back(kind);
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw InvalidArgument("phi list is empty");
  return out;
}

std::shared_ptr<const GeneratorSpec> share(GeneratorSpec spec) {
  return std::make_shared<const GeneratorSpec>(std::move(spec));
}

bool variant_ii(const ScenarioConfig& c) {
  if (c.variant == "i") return false;
  if (c.variant == "ii") return true;
  throw InvalidArgument("variant must be i or ii");
}

GeneratorSpec wiener(const ScenarioConfig& c, MeanShape mean, double r) {
  return GeneratorSpec{WienerSpec{GridSpec::equispaced(c.grid_points), mean, r}};
}

GeneratorSpec basis(CoeffDist dist) {
  return GeneratorSpec{BasisSpec{power_weights(9, 2.5), dist}};
}

GeneratorSpec sincos(const ScenarioConfig& c, TrigSide side, CoeffDist dist) {
  return GeneratorSpec{SinCosSpec{c.d, side, dist, c.normalized_cos}};
}

PhiPower summarize(PhiKind kind, std::size_t rejections, std::size_t reps) {
  PhiPower p;
  p.phi = kind;
  p.rejections = rejections;
  p.rate = static_cast<double>(rejections) / static_cast<double>(reps);
  p.stderr_ = binomial_se(p.rate, reps);
  return p;
}

// Runs `reps` replications of `body` (returning per-phi rejections) in parallel.
template <typename Body>
std::vector<std::size_t> count_rejections(std::size_t reps, std::size_t kinds, unsigned threads,
                                          const ProgressFn& progress, Body&& body) {
  std::vector<std::vector<bool>> decisions(reps);
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  parallel_for(reps, threads, [&](std::size_t rep) {
    decisions[rep] = body(rep);
    const std::size_t now = ++done;
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(now, reps);
    }
  });
  std::vector<std::size_t> counts(kinds, 0);
  for (const auto& d : decisions)
    for (std::size_t k = 0; k < kinds; ++k) counts[k] += d[k] ? 1 : 0;
  return counts;
}

}  // namespace

void validate(const ScenarioConfig& c) {
  if (std::find(std::begin(kScenarios), std::end(kScenarios), c.scenario) == std::end(kScenarios))
    throw InvalidArgument("unknown scenario '" + c.scenario + "' (expected ex1 .. ex9)");
  if (c.n == 0 || c.m == 0) throw InvalidArgument("n and m must be >= 1");
  if (c.b == 0) throw InvalidArgument("B must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (c.reps == 0) throw InvalidArgument("reps must be >= 1");
  if (c.phis.empty()) throw InvalidArgument("at least one phi is required");
  if (c.grid_points < 2) throw InvalidArgument("grid_points must be >= 2");
  if (c.d == 0) throw InvalidArgument("d must be >= 1");
  if (!(c.sigma > 0.0)) throw InvalidArgument("sigma must be > 0");
  if (c.delta < 0.0) throw InvalidArgument("delta must be >= 0");
  variant_ii(c);
}

void set_config_value(ScenarioConfig& c, std::string_view key, std::string_view raw) {
  const std::string value = trimmed(raw);
  if (key == "scenario")
    c.scenario = value;
  else if (key == "n")
    c.n = parse_integer<std::size_t>(key, value);
  else if (key == "m")
    c.m = parse_integer<std::size_t>(key, value);
  else if (key == "B" || key == "b")
    c.b = parse_integer<std::size_t>(key, value);
  else if (key == "alpha")
    c.alpha = parse_real(key, value);
  else if (key == "reps")
    c.reps = parse_integer<std::size_t>(key, value);
  else if (key == "phi")
    c.phis = parse_phi_list(value);
  else if (key == "seed")
    c.seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "r")
    c.r = parse_real(key, value);
  else if (key == "sigma")
    c.sigma = parse_real(key, value);
  else if (key == "d")
    c.d = parse_integer<std::size_t>(key, value);
  else if (key == "delta")
    c.delta = parse_real(key, value);
  else if (key == "variant")
    c.variant = value;
  else if (key == "grid_points")
    c.grid_points = parse_integer<std::size_t>(key, value);
  else if (key == "normalized_cos")
    c.normalized_cos = parse_bool(key, value);
  else if (key == "threads")
    c.threads = parse_integer<unsigned>(key, value);
  else
    throw InvalidArgument("unknown config key '" + std::string(key) + "'");
}

void apply_config_text(ScenarioConfig& config, std::istream& in) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trimmed(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(number) + ": expected key=value");
    set_config_value(config, trimmed(std::string_view(text).substr(0, eq)),
                     std::string_view(text).substr(eq + 1));
  }
}

void apply_config_file(ScenarioConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  apply_config_text(config, in);
}

std::string primary_parameter(const ScenarioConfig& c) {
  if (c.scenario == "ex4") return "r";
  if (c.scenario == "ex5") return "sigma";
  if (c.scenario == "ex6") return "d";
  if (c.scenario == "ex7" || c.scenario == "ex8" || c.scenario == "ex9") return "delta";
  return "n";
}

double parameter_value(const ScenarioConfig& c, std::string_view parameter) {
  if (parameter == "r") return c.r;
  if (parameter == "sigma") return c.sigma;
  if (parameter == "d") return static_cast<double>(c.d);
  if (parameter == "delta") return c.delta;
  if (parameter == "n" || parameter == "nm") return static_cast<double>(c.n);
  if (parameter == "m") return static_cast<double>(c.m);
  if (parameter == "alpha") return c.alpha;
  throw InvalidArgument("unknown sweep parameter '" + std::string(parameter) + "'");
}

ScenarioLaws build_scenario(const ScenarioConfig& c) {
  validate(c);
  const bool ii = variant_ii(c);
  const CoeffDist var2 = CoeffDist::normal(0.0, std::sqrt(2.0));
  switch (c.scenario[2] - '0') {
    case 1:
      return {wiener(c, MeanShape::Zero, 0.0), wiener(c, MeanShape::Zero, 0.0)};
    case 2:
      return {wiener(c, MeanShape::Linear, 1.0), wiener(c, MeanShape::Linear, 1.0)};
    case 3:
      return {basis(CoeffDist::normal(0.0, 1.0)), basis(CoeffDist::normal(0.0, 1.0))};
    case 4:
      return {wiener(c, MeanShape::Zero, 0.0),
              wiener(c, ii ? MeanShape::Exponential : MeanShape::Quadratic, c.r)};
    case 5:
      if (ii) return {basis(CoeffDist::cauchy(1.0)), basis(CoeffDist::cauchy(c.sigma))};
      return {basis(CoeffDist::normal(0.0, 1.0)), basis(CoeffDist::normal(0.0, c.sigma))};
    case 6:
      return {sincos(c, TrigSide::Sin, var2),
              sincos(c, TrigSide::Cos, ii ? CoeffDist::student_t(4.0) : var2)};
    case 7: {
      GeneratorSpec u = sincos(c, TrigSide::Sin, var2);
      GeneratorSpec v = sincos(c, TrigSide::Cos, var2);
      return {u, GeneratorSpec{MixtureSpec{share(u), share(std::move(v)), c.delta}}};
    }
    case 8:
    case 9: {
      GeneratorSpec f = basis(CoeffDist::normal(0.0, 1.0));
      GeneratorSpec g = c.scenario == "ex8" ? basis(CoeffDist::normal(1.0, 1.0)) : basis(var2);
      return {f, GeneratorSpec{MixtureSpec{share(f), share(std::move(g)), c.delta}}};
    }
    default:
      break;
  }
  throw InvalidArgument("unknown scenario '" + c.scenario + "'");
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t rep) {
  return substream(seed, rep);
}

FunctionalSample draw_scenario(const ScenarioConfig& c, std::size_t rep) {
  const ScenarioLaws laws = build_scenario(c);
  const std::uint64_t s = replication_seed(c.seed, rep);
  Eigen::MatrixXd x = generate(laws.x, c.n, substream(s, 0));
  Eigen::MatrixXd y = generate(laws.y, c.m, substream(s, 1));
  std::optional<GridSpec> grid;
  if (representation(laws.x) == Representation::Grid)
    grid = std::get<WienerSpec>(laws.x.kind).grid;
  return FunctionalSample::from_groups(representation(laws.x), x, y, std::move(grid));
}

ReplicationOutcome run_replication(const ScenarioConfig& c, std::size_t rep) {
  const FunctionalSample sample = draw_scenario(c, rep);
  const GramMatrix g = gram(sample);
  ReplicationOutcome out;
  out.results = permutation_tests(g, sample.labels(), c.phis, c.b,
                                  substream(replication_seed(c.seed, rep), 2));
  for (const auto& r : out.results) out.rejected.push_back(r.p_value <= c.alpha);
  return out;
}

const PhiPower& PowerEstimate::at(PhiKind kind) const {
  for (const auto& p : per_phi)
    if (p.phi == kind) return p;
  throw InvalidArgument("phi " + std::string(to_string(kind)) + " was not run");
}

PowerEstimate run_power(const ScenarioConfig& c, const ProgressFn& progress) {
  build_scenario(c);
  const auto counts = count_rejections(c.reps, c.phis.size(), c.threads, progress,
                                       [&](std::size_t rep) { return run_replication(c, rep).rejected; });
  PowerEstimate est;
  est.config = c;
  est.reps_done = c.reps;
  for (std::size_t k = 0; k < c.phis.size(); ++k)
    est.per_phi.push_back(summarize(c.phis[k], counts[k], c.reps));
  return est;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::string& parameter,
                                const std::vector<double>& values, const ProgressFn& progress) {
  std::vector<SweepRow> rows;
  for (double v : values) {
    ScenarioConfig c = base;
    const auto count = [&] {
      if (!(v >= 0.0) || v != std::floor(v))
        throw InvalidArgument(parameter + " must be a nonnegative integer");
      return static_cast<std::size_t>(v);
    };
    if (parameter == "r")
      c.r = v;
    else if (parameter == "sigma")
      c.sigma = v;
    else if (parameter == "delta")
      c.delta = v;
    else if (parameter == "d")
      c.d = count();
    else if (parameter == "n")
      c.n = count();
    else if (parameter == "m")
      c.m = count();
    else if (parameter == "nm")
      c.n = c.m = count();
    else if (parameter == "alpha")
      c.alpha = v;
    else
      throw InvalidArgument("unknown sweep parameter '" + parameter + "'");
    rows.push_back(SweepRow{parameter, v, run_power(c, progress)});
  }
  return rows;
}

PowerEstimate run_subsample_power(const FunctionalSample& data, std::size_t pooled_size,
                                  double proportion, const ScenarioConfig& c,
                                  const ProgressFn& progress) {
  if (!(proportion > 0.0 && proportion < 1.0))
    throw InvalidArgument("proportion must lie in (0, 1)");
  const auto n = static_cast<std::size_t>(std::lround(static_cast<double>(pooled_size) * proportion));
  if (n == 0 || n >= pooled_size)
    throw InvalidArgument("pooled size and proportion leave an empty group");
  const std::size_t m = pooled_size - n;
  if (n > data.n() || m > data.m())
    throw InvalidArgument("sub-sample is larger than the available groups");
  if (c.reps == 0 || c.b == 0 || !(c.alpha > 0.0 && c.alpha < 1.0))
    throw InvalidArgument("invalid reps, B or alpha");

  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  for (std::size_t i = 0; i < data.size(); ++i)
    (data.labels()[i] == 0 ? first : second).push_back(i);
  // The Gram matrix of the full data contains every sub-sample's Gram matrix.
  const GramMatrix full = gram(data, c.threads);

  const auto counts = count_rejections(c.reps, c.phis.size(), c.threads, progress, [&](std::size_t rep) {
    const std::uint64_t s = replication_seed(c.seed, rep);
    CounterRng rng(substream(s, 0));
    std::vector<std::size_t> picked;
    picked.reserve(pooled_size);
    std::sample(first.begin(), first.end(), std::back_inserter(picked), n, rng);
    std::sample(second.begin(), second.end(), std::back_inserter(picked), m, rng);
    const auto idx = std::vector<Eigen::Index>(picked.begin(), picked.end());
    GramMatrix g{full.values(idx, idx)};
    const Labels labels = block_labels(n, m);
    const auto results = permutation_tests(g, labels, c.phis, c.b, substream(s, 2));
    std::vector<bool> rejected;
    for (const auto& r : results) rejected.push_back(r.p_value <= c.alpha);
    return rejected;
  });

  PowerEstimate est;
  est.config = c;
  est.config.n = n;
  est.config.m = m;
  est.reps_done = c.reps;
  for (std::size_t k = 0; k < c.phis.size(); ++k)
    est.per_phi.push_back(summarize(c.phis[k], counts[k], c.reps));
  return est;
}

void write_ledger_header(std::ostream& out) {
  out << "scenario,param,value,phi,reps,rejections,rate,stderr,seed\n";
}

void write_ledger_rows(std::ostream& out, const SweepRow& row) {
  const auto& est = row.estimate;
  for (const auto& p : est.per_phi) {
    std::ostringstream line;
    line.precision(10);
    line << est.config.scenario << ',' << row.parameter << ',' << row.value << ','
         << to_string(p.phi) << ',' << est.reps_done << ',' << p.rejections << ',' << p.rate
         << ',' << p.stderr_ << ',' << est.config.seed << '\n';
    out << line.str();
  }
}

void append_ledger(const std::string& path, const std::vector<SweepRow>& rows) {
  bool fresh = true;
  {
    std::ifstream probe(path, std::ios::binary | std::ios::ate);
    fresh = !probe || probe.tellg() <= 0;
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw DataError("cannot write ledger '" + path + "'");
  if (fresh) write_ledger_header(out);
  for (const auto& row : rows) write_ledger_rows(out, row);
}

}  // namespace pbf
