#include "pbf/errors.hpp"
#include "pbf/harness.hpp"
#include "pbf/stats_util.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace pbf;

namespace {

ScenarioConfig small(const std::string& scenario) {
  ScenarioConfig c;
  c.scenario = scenario;
  c.n = c.m = 10;
  c.b = 49;
  c.reps = 12;
  c.seed = 5;
  return c;
}

bool within_3se(const PhiPower& p, double target, std::size_t reps) {
  return std::abs(p.rate - target) <= 3.0 * binomial_se(target, reps);
}

}  // namespace

TEST_CASE("config text and overrides") {
  ScenarioConfig c;
  std::istringstream in("# level study\nscenario = ex4\nn=30\nm = 40\nB=99\nalpha=0.1\n"
                        "reps=7\nphi=l2,log\nseed=123\nr=0.5\nvariant=ii\n");
  apply_config_text(c, in);
  CHECK(c.scenario == "ex4");
  CHECK(c.n == 30);
  CHECK(c.m == 40);
  CHECK(c.b == 99);
  CHECK(c.alpha == 0.1);
  CHECK(c.reps == 7);
  CHECK(c.phis == std::vector<PhiKind>{PhiKind::L2, PhiKind::Log});
  CHECK(c.seed == 123);
  CHECK(c.r == 0.5);
  set_config_value(c, "n", "12");
  CHECK(c.n == 12);
  set_config_value(c, "phi", "all");
  CHECK(c.phis.size() == 3);

  CHECK_THROWS_AS(set_config_value(c, "colour", "red"), InvalidArgument);
  CHECK_THROWS_AS(set_config_value(c, "n", "ten"), InvalidArgument);
  std::istringstream broken("scenario ex1\n");
  CHECK_THROWS_AS(apply_config_text(c, broken), InvalidArgument);
}

TEST_CASE("validation") {
  ScenarioConfig c;
  CHECK_NOTHROW(validate(c));
  c.scenario = "ex10";
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = {};
  c.alpha = 1.0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = {};
  c.reps = 0;
  CHECK_THROWS_AS(validate(c), InvalidArgument);
  c = {};
  c.variant = "iii";
  CHECK_THROWS_AS(validate(c), InvalidArgument);
}

TEST_CASE("every scenario draws a sample") {
  for (int i = 1; i <= 9; ++i) {
    ScenarioConfig c = small("ex" + std::to_string(i));
    c.d = 9;
    c.delta = 1.0;
    for (const char* v : {"i", "ii"}) {
      c.variant = v;
      const FunctionalSample s = draw_scenario(c, 0);
      CHECK(s.n() == 10);
      CHECK(s.m() == 10);
      CHECK(s.data().allFinite());
    }
  }
  const ScenarioConfig wiener = small("ex1");
  CHECK(draw_scenario(wiener, 0).kind() == Representation::Grid);
  CHECK(draw_scenario(small("ex6"), 0).dimension() == 162);
}

TEST_CASE("replications are reproducible in isolation") {
  ScenarioConfig c = small("ex4");
  c.r = 1.0;
  const ReplicationOutcome a = run_replication(c, 3);
  const ReplicationOutcome b = run_replication(c, 3);
  REQUIRE(a.results.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.results[k].p_value == b.results[k].p_value);
    CHECK(a.results[k].zeta_hat == b.results[k].zeta_hat);
  }
  // Replication 3 does not depend on how many replications run.
  ScenarioConfig more = c;
  more.reps = 50;
  CHECK(draw_scenario(more, 3).data() == draw_scenario(c, 3).data());
  CHECK(draw_scenario(c, 4).data() != draw_scenario(c, 3).data());
}

TEST_CASE("rates are independent of thread count") {
  ScenarioConfig c = small("ex3");
  const PowerEstimate serial = run_power(c);
  c.threads = 3;
  const PowerEstimate parallel = run_power(c);
  REQUIRE(serial.per_phi.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(serial.per_phi[k].rejections == parallel.per_phi[k].rejections);
    CHECK(serial.per_phi[k].rate ==
          static_cast<double>(serial.per_phi[k].rejections) / static_cast<double>(c.reps));
  }
  CHECK(serial.at(PhiKind::Log).phi == PhiKind::Log);
}

TEST_CASE("sweeps") {
  ScenarioConfig c = small("ex4");
  c.phis = {PhiKind::L2};
  CHECK(run_sweep(c, "r", {}).empty());
  const auto rows = run_sweep(c, "r", {0.0, 2.0});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == 0.0);
  CHECK(rows[1].estimate.config.r == 2.0);
  CHECK(rows[1].estimate.per_phi[0].rate >= rows[0].estimate.per_phi[0].rate);
  CHECK(run_sweep(c, "nm", {6.0})[0].estimate.config.m == 6);
  CHECK_THROWS_AS(run_sweep(c, "colour", {1.0}), InvalidArgument);
  CHECK_THROWS_AS(run_sweep(c, "n", {2.5}), InvalidArgument);
}

TEST_CASE("null points of the location and scale sweeps") {
  ScenarioConfig c;
  c.phis = {PhiKind::L2};
  c.reps = 400;
  c.b = 300;
  c.n = c.m = 50;
  c.seed = 2024;
  c.scenario = "ex4";
  const auto r0 = run_sweep(c, "r", {0.0});
  CHECK(within_3se(r0[0].estimate.per_phi[0], 0.042, c.reps));
  c.scenario = "ex5";
  const auto s1 = run_sweep(c, "sigma", {1.0});
  CHECK(within_3se(s1[0].estimate.per_phi[0], 0.05, c.reps));
}

TEST_CASE("level of Example 1 at n = m = 20") {
  ScenarioConfig c;
  c.seed = 77;
  const PowerEstimate est = run_power(c);
  for (const auto& p : est.per_phi) {
    CHECK(p.rate >= 0.029);
    CHECK(p.rate <= 0.071);
  }
}

TEST_CASE("sub-sample power keeps the group proportions") {
  ScenarioConfig gen = small("ex4");
  gen.n = 30;
  gen.m = 20;
  gen.r = 3.0;
  const FunctionalSample data = draw_scenario(gen, 0);
  ScenarioConfig c = small("ex1");
  c.phis = {PhiKind::L2};
  const PowerEstimate est = run_subsample_power(data, 20, 0.6, c);
  CHECK(est.config.n == 12);
  CHECK(est.config.m == 8);
  CHECK(est.per_phi[0].rate > 0.5);
  CHECK(run_subsample_power(data, 20, 0.6, c).per_phi[0].rejections == est.per_phi[0].rejections);
  CHECK_THROWS_AS(run_subsample_power(data, 20, 0.0, c), InvalidArgument);
  CHECK_THROWS_AS(run_subsample_power(data, 60, 0.5, c), InvalidArgument);
}

TEST_CASE("ledger rows") {
  ScenarioConfig c = small("ex1");
  c.phis = {PhiKind::L2, PhiKind::Exp};
  const SweepRow row{"n", 10.0, run_power(c)};
  std::ostringstream out;
  write_ledger_header(out);
  write_ledger_rows(out, row);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "scenario,param,value,phi,reps,rejections,rate,stderr,seed");
  std::string first;
  std::getline(lines, first);
  CHECK(first.rfind("ex1,n,10,l2,12,", 0) == 0);

  const auto path = std::filesystem::temp_directory_path() / "pbf_ledger_test.csv";
  std::filesystem::remove(path);
  append_ledger(path.string(), {row});
  append_ledger(path.string(), {row});
  std::ifstream in(path);
  std::size_t count = 0;
  std::size_t headers = 0;
  for (std::string line; std::getline(in, line);) {
    ++count;
    headers += line.rfind("scenario,", 0) == 0 ? 1 : 0;
  }
  CHECK(count == 5);
  CHECK(headers == 1);
}
