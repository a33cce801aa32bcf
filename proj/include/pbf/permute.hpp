#pragma once

#include "pbf/curves.hpp"
#include "pbf/statistic.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pbf {

enum class PermutationMode { Exhaustive, Randomized };

std::string_view to_string(PermutationMode mode);

struct TestResult {
  double zeta_hat = 0.0;
  double scaled = 0.0;
  double p_value = 1.0;
  /// Number of random permutations (randomized) or of enumerated assignments.
  std::size_t b_used = 0;
  PermutationMode mode = PermutationMode::Randomized;
  PhiKind phi = PhiKind::L2;
  std::size_t n = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::optional<std::vector<double>> replicate_stats;
};

struct PermutationOptions {
  unsigned threads = 1;
  bool keep_replicates = false;
  /// Labelings evaluated per batch; bounds the working memory to N x batch.
  std::size_t batch = 512;
};

/// Evaluates the projected statistic for many relabelings of one pooled sample.
/// The Gram matrix is shared; only group membership changes between labelings.
///
/// L2 sorts every Gram column once and scores each labeling by one pass over
/// the sorted order. Exp and Log build the phi matrix of one direction at a
/// time and score a whole batch of labelings with a single matrix product.
class PermutationEngine {
 public:
  PermutationEngine(const GramMatrix& g, PhiKind kind, GroupSizes sizes);

  std::size_t size() const noexcept { return size_; }
  GroupSizes sizes() const noexcept { return sizes_; }
  PhiKind phi() const noexcept { return kind_; }

  /// Statistic (unscaled) for every labeling. Labelings must have group sizes
  /// n and m; results come back in input order.
  std::vector<double> evaluate(std::span<const Labels> labelings, unsigned threads = 1,
                               std::size_t batch = 512) const;

 private:
  void evaluate_l2(std::span<const Labels> labelings, std::span<double> out) const;
  void evaluate_dense(std::span<const Labels> labelings, std::span<double> out) const;

  GramMatrix g_;
  PhiKind kind_;
  GroupSizes sizes_;
  std::size_t size_;
  // Column-wise sort order of g (L2 only), stored column-major.
  std::vector<std::uint32_t> order_;
};

/// Labels after permuting the pooled indices: the curve at pooled index
/// perm[k] takes the label that position k had.
Labels permute_labels(std::span<const std::uint8_t> labels, std::span<const std::size_t> perm);

/// Statistic for a relabeling of the pooled sample. Throws if the relabeling
/// does not have the expected group sizes.
double permuted_statistic(const GramMatrix& g, std::span<const std::uint8_t> permuted_labels,
                          GroupSizes expected, PhiKind kind);

/// Uniform random permutation of {0..size-1} drawn by Fisher-Yates from the
/// substream (seed, index).
std::vector<std::size_t> random_permutation(std::size_t size, std::uint64_t seed,
                                            std::uint64_t index);

/// Binomial coefficient, saturating at SIZE_MAX.
std::size_t choose(std::size_t n, std::size_t k) noexcept;

/// All C(N, n) group assignments with n zeros, in lexicographic order.
std::vector<Labels> enumerate_assignments(std::size_t n, std::size_t m);

struct CriticalValue {
  double value = 0.0;
  bool exact = false;
  /// Assignments enumerated (exact) or random permutations drawn.
  std::size_t count = 0;
};

/// c_alpha = inf{ t : share of permuted statistics <= t is >= 1 - alpha }.
/// Exact over all C(N, n) assignments when that count is <= budget, otherwise
/// estimated from `fallback_b` random permutations.
CriticalValue critical_value(const GramMatrix& g, std::span<const std::uint8_t> labels,
                             PhiKind kind, double alpha, std::size_t budget = 100000,
                             std::size_t fallback_b = 500, std::uint64_t seed = 0);

/// Smallest t with at least ceil((1 - alpha) * K) of the K values <= t.
double upper_quantile_inf(std::vector<double> values, double alpha);

/// Exact permutation p-value over all distinct assignments. Throws if C(N, n)
/// exceeds the budget.
TestResult exhaustive_test(const GramMatrix& g, std::span<const std::uint8_t> labels,
                           PhiKind kind, std::size_t budget = 100000,
                           const PermutationOptions& options = {});

/// Randomized permutation test sharing one Gram matrix and one set of B
/// permutations across several kernels.
std::vector<TestResult> permutation_tests(const GramMatrix& g,
                                          std::span<const std::uint8_t> labels,
                                          std::span<const PhiKind> kinds, std::size_t b,
                                          std::uint64_t seed,
                                          const PermutationOptions& options = {});

TestResult permutation_test(const GramMatrix& g, std::span<const std::uint8_t> labels,
                            PhiKind kind, std::size_t b, std::uint64_t seed,
                            const PermutationOptions& options = {});

/// Computes the Gram matrix once, then runs the randomized test.
TestResult permutation_test(const FunctionalSample& sample, PhiKind kind, std::size_t b,
                            std::uint64_t seed, const PermutationOptions& options = {});

/// Permuted values within this tolerance below the observed statistic count as
/// ties (>=). Scales with the largest magnitude involved.
double tie_tolerance(double observed, std::span<const double> permuted) noexcept;

}  // namespace pbf
