#include "pbf/errors.hpp"
#include "pbf/statistic.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace pbf;

namespace {

GramMatrix hand_gram() {
  GramMatrix g;
  g.values.resize(2, 2);
  g.values << 1.0, 0.5, 0.5, 1.0 / 3.0;
  return g;
}

Labels swapped(const Labels& l) {
  Labels out(l);
  for (auto& v : out) v = static_cast<std::uint8_t>(1 - v);
  return out;
}

Labels random_labels(std::size_t n, std::size_t m, std::uint64_t seed) {
  Labels l = block_labels(n, m);
  CounterRng rng(seed);
  std::shuffle(l.begin(), l.end(), rng);
  return l;
}

}  // namespace

TEST_CASE("phi values") {
  CHECK(phi_eval(PhiKind::L2, 0.25) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(phi_eval(PhiKind::Exp, 0.0) == 0.0);
  CHECK(phi_eval(PhiKind::Log, std::numbers::e - 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(phi_eval(PhiKind::Exp, 2.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK_THROWS_AS(phi_eval(PhiKind::L2, -1e-3), InvalidArgument);
  CHECK_THROWS_AS(phi_eval(PhiKind::Log, NAN), InvalidArgument);
  for (PhiKind k : kAllPhis) CHECK(parse_phi(to_string(k)) == k);
  CHECK_THROWS_AS(parse_phi("gauss"), InvalidArgument);
}

TEST_CASE("one-dimensional statistic") {
  const Labels l{0, 1};
  const double p[] = {1.0, 0.5};
  CHECK(bf_statistic_1d(p, l, PhiKind::L2) == doctest::Approx(0.5).epsilon(1e-15));

  const double flat[] = {2.0, 2.0, 2.0, 2.0};
  const Labels l4{0, 1, 0, 1};
  for (PhiKind k : kAllPhis) CHECK(bf_statistic_1d(flat, l4, k) == 0.0);

  // Same multiset in both groups.
  const double twin[] = {0.3, -1.2, 2.5, 0.3, 2.5, -1.2};
  const Labels lt{0, 0, 0, 1, 1, 1};
  for (PhiKind k : kAllPhis) CHECK(std::abs(bf_statistic_1d(twin, lt, k)) <= 1e-12);
}

TEST_CASE("hand value for n = m = 1") {
  const GramMatrix g = hand_gram();
  const Labels l{0, 1};
  const StatisticValue v = pbf_statistic(g, l, PhiKind::L2);
  CHECK(std::abs(v.zeta_hat - 1.0 / 3.0) <= 1e-12);
  CHECK(std::abs(v.scaled - 1.0 / 6.0) <= 1e-12);
  CHECK(std::abs(pbf_statistic_oracle(g, l, PhiKind::L2) - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("all-zero curves give zero") {
  GramMatrix g{Eigen::MatrixXd::Zero(5, 5)};
  const Labels l{0, 0, 1, 1, 1};
  for (PhiKind k : kAllPhis) {
    CHECK(pbf_statistic_oracle(g, l, k) == 0.0);
    CHECK(pbf_statistic(g, l, k).zeta_hat == 0.0);
  }
}

TEST_CASE("fast statistic matches the triple-sum oracle") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 1 + seed % 7;
    const std::size_t m = 1 + (seed / 7) % 6;
    const GramMatrix g = testing::random_gram(n + m, 4, seed);
    const Labels l = random_labels(n, m, seed + 1);
    for (PhiKind k : kAllPhis) {
      const double fast = pbf_statistic(g, l, k).zeta_hat;
      const double slow = pbf_statistic_oracle(g, l, k);
      CHECK(std::abs(fast - slow) <= 1e-10 * (1.0 + std::abs(slow)));
    }
  }
}

TEST_CASE("swap symmetry") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GramMatrix g = testing::random_gram(11, 3, seed);
    const Labels l = random_labels(5, 6, seed);
    for (PhiKind k : kAllPhis) {
      const double a = pbf_statistic(g, l, k).zeta_hat;
      const double b = pbf_statistic(g, swapped(l), k).zeta_hat;
      CHECK(a == b);
    }
  }
}

TEST_CASE("self-match is zero") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd x = testing::random_rows(6, 4, seed);
    Eigen::MatrixXd pooled(12, 4);
    pooled << x, x.colwise().reverse();
    const GramMatrix g = gram(pooled, Representation::Coeff);
    const Labels l = block_labels(6, 6);
    for (PhiKind k : kAllPhis) CHECK(std::abs(pbf_statistic(g, l, k).zeta_hat) <= 1e-12);
  }
}

TEST_CASE("orthogonal invariance") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd x = testing::random_rows(12, 5, seed);
    const Eigen::MatrixXd q = testing::random_orthogonal(5, seed + 7);
    const Labels l = block_labels(5, 7);
    for (PhiKind k : kAllPhis) {
      const double a = pbf_statistic(gram(x, Representation::Coeff), l, k).zeta_hat;
      const double b = pbf_statistic(gram(x * q, Representation::Coeff), l, k).zeta_hat;
      CHECK(std::abs(a - b) <= 1e-8 * std::abs(a));
    }
  }
}

TEST_CASE("statistic is nonnegative") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const GramMatrix g = testing::random_gram(9, 2, seed);
    const Labels l = random_labels(4, 5, seed);
    for (PhiKind k : kAllPhis) CHECK(pbf_statistic(g, l, k).zeta_hat >= -1e-12);
  }
}

TEST_CASE("argument validation") {
  const GramMatrix g = hand_gram();
  CHECK_THROWS_AS(pbf_statistic(g, Labels{0, 0}, PhiKind::L2), InvalidArgument);
  CHECK_THROWS_AS(pbf_statistic(g, Labels{0, 1, 1}, PhiKind::L2), InvalidArgument);
  const double p[] = {1.0};
  CHECK_THROWS_AS(bf_statistic_1d(p, Labels{0, 1}, PhiKind::L2), InvalidArgument);
  CHECK(scale_factor(20, 30) == doctest::Approx(12.0));
}
