#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pbf {

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> xs, double p);

/// sup_x |F_a(x) - F_b(x)| between two empirical CDFs.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// sup over the atoms k/(B+1), k = 1..B+1, of |F_emp - F_unif| where F_unif is
/// the discrete uniform law on those atoms.
double ks_distance_discrete_uniform(std::vector<double> p_values, std::size_t b);

/// Asymptotic one-sample Kolmogorov-Smirnov critical value at level 1%,
/// 1.628 / sqrt(n).
double ks_critical_1pct(std::size_t n);

/// sqrt(p (1 - p) / reps)
double binomial_se(double p, std::size_t reps);

}  // namespace pbf
