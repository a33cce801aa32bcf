#include "pbf/stats_util.hpp"

#include "pbf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pbf {

double mean(std::span<const double> xs) {
  if (xs.empty()) throw InvalidArgument("mean of empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) throw InvalidArgument("variance needs at least two values");
  const double mu = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return s / static_cast<double>(xs.size() - 1);
}

double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw InvalidArgument("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile level must lie in [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double h = p * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("KS distance of empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_distance_discrete_uniform(std::vector<double> p_values, std::size_t b) {
  if (p_values.empty()) throw InvalidArgument("no p-values");
  std::sort(p_values.begin(), p_values.end());
  const double atoms = static_cast<double>(b + 1);
  const double count = static_cast<double>(p_values.size());
  double d = 0.0;
  std::size_t i = 0;
  for (std::size_t k = 1; k <= b + 1; ++k) {
    const double atom = static_cast<double>(k) / atoms;
    while (i < p_values.size() && p_values[i] <= atom + 1e-12) ++i;
    d = std::max(d, std::abs(static_cast<double>(i) / count - static_cast<double>(k) / atoms));
  }
  return d;
}

double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

double binomial_se(double p, std::size_t reps) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

}  // namespace pbf
