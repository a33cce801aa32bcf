#include "pbf/permute.hpp"

#include "pbf/errors.hpp"
#include "pbf/parallel.hpp"
#include "pbf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace pbf {

namespace {

void check_sizes(std::span<const std::uint8_t> labels, GroupSizes expected) {
  const GroupSizes got = group_sizes(labels);
  if (got.n != expected.n || got.m != expected.m)
    throw InvalidArgument("relabeling has group sizes (" + std::to_string(got.n) + ", " +
                          std::to_string(got.m) + "), expected (" + std::to_string(expected.n) +
                          ", " + std::to_string(expected.m) + ")");
}

double p_value_randomized(double observed, std::span<const double> permuted) {
  const double tol = tie_tolerance(observed, permuted);
  std::size_t hits = 0;
  for (double v : permuted)
    if (v >= observed - tol) ++hits;
  return static_cast<double>(hits + 1) / static_cast<double>(permuted.size() + 1);
}

}  // namespace

std::string_view to_string(PermutationMode mode) {
  return mode == PermutationMode::Exhaustive ? "exhaustive" : "randomized";
}

PermutationEngine::PermutationEngine(const GramMatrix& g, PhiKind kind, GroupSizes sizes)
    : g_(g), kind_(kind), sizes_(sizes), size_(g.size()) {
  if (sizes.n + sizes.m != size_)
    throw InvalidArgument("group sizes do not add up to the Gram dimension");
  if (sizes.n == 0 || sizes.m == 0) throw InvalidArgument("both groups need at least one curve");
  if (kind_ == PhiKind::L2) {
    order_.resize(size_ * size_);
    for (std::size_t c = 0; c < size_; ++c) {
      const double* col = g_.values.col(static_cast<Eigen::Index>(c)).data();
      auto first = order_.begin() + static_cast<std::ptrdiff_t>(c * size_);
      std::iota(first, first + static_cast<std::ptrdiff_t>(size_), std::uint32_t{0});
      std::sort(first, first + static_cast<std::ptrdiff_t>(size_),
                [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }
  }
}

std::vector<double> PermutationEngine::evaluate(std::span<const Labels> labelings,
                                                unsigned threads, std::size_t batch) const {
  for (const auto& l : labelings) {
    if (l.size() != size_) throw InvalidArgument("labeling length does not match Gram size");
    check_sizes(l, sizes_);
  }
  std::vector<double> out(labelings.size(), 0.0);
  if (labelings.empty()) return out;
  const unsigned workers = resolve_threads(threads);
  std::size_t chunk = std::max<std::size_t>(1, batch);
  if (workers > 1)
    chunk = std::min(chunk, (labelings.size() + workers - 1) / workers);
  const std::size_t chunks = (labelings.size() + chunk - 1) / chunk;
  parallel_for(chunks, workers, [&](std::size_t ci) {
    const std::size_t begin = ci * chunk;
    const std::size_t len = std::min(chunk, labelings.size() - begin);
    auto part = labelings.subspan(begin, len);
    std::span<double> dst(out.data() + begin, len);
    if (kind_ == PhiKind::L2)
      evaluate_l2(part, dst);
    else
      evaluate_dense(part, dst);
  });
  return out;
}

void PermutationEngine::evaluate_l2(std::span<const Labels> labelings,
                                    std::span<double> out) const {
  const double dn = static_cast<double>(sizes_.n);
  const double dm = static_cast<double>(sizes_.m);
  const double w[2] = {0.5 / dn, 0.5 / dm};
  for (std::size_t b = 0; b < labelings.size(); ++b) {
    const std::uint8_t* lab = labelings[b].data();
    double zeta = 0.0;
    for (std::size_t c = 0; c < size_; ++c) {
      const double* col = g_.values.col(static_cast<Eigen::Index>(c)).data();
      const std::uint32_t* ord = order_.data() + c * size_;
      double count[2] = {0.0, 0.0};
      double sum[2] = {0.0, 0.0};
      double within[2] = {0.0, 0.0};
      double cross = 0.0;
      for (std::size_t r = 0; r < size_; ++r) {
        const std::uint32_t idx = ord[r];
        const double v = col[idx];
        const int grp = lab[idx];
        within[grp] += count[grp] * v - sum[grp];
        cross += count[1 - grp] * v - sum[1 - grp];
        count[grp] += 1.0;
        sum[grp] += v;
      }
      // phi(d^2) = |d| / 2; ordered within pairs count each unordered pair twice.
      const double t = cross / (dn * dm) - within[0] / (dn * dn) - within[1] / (dm * dm);
      zeta += w[lab[c]] * t;
    }
    out[b] = zeta;
  }
}

void PermutationEngine::evaluate_dense(std::span<const Labels> labelings,
                                       std::span<double> out) const {
  const auto size = static_cast<Eigen::Index>(size_);
  const auto count = static_cast<Eigen::Index>(labelings.size());
  const double dn = static_cast<double>(sizes_.n);
  const double dm = static_cast<double>(sizes_.m);

  // Column b is the indicator of the first group under labeling b.
  Eigen::MatrixXd ind(size, count);
  for (Eigen::Index b = 0; b < count; ++b)
    for (Eigen::Index j = 0; j < size; ++j)
      ind(j, b) = labelings[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)] == 0 ? 1.0 : 0.0;

  Eigen::MatrixXd phi_mat(size, size);
  Eigen::MatrixXd q(size, count);
  Eigen::ArrayXd zeta = Eigen::ArrayXd::Zero(count);
  for (Eigen::Index c = 0; c < size; ++c) {
    const auto col = g_.values.col(c);
    for (Eigen::Index k = 0; k < size; ++k) {
      phi_mat(k, k) = 0.0;
      for (Eigen::Index j = k + 1; j < size; ++j) {
        const double d = col(j) - col(k);
        const double v = phi_unchecked(kind_, d * d);
        phi_mat(j, k) = v;
        phi_mat(k, j) = v;
      }
    }
    const Eigen::VectorXd row_sums = phi_mat.rowwise().sum();
    const double total = row_sums.sum();
    q.noalias() = phi_mat * ind;
    const Eigen::ArrayXd s_aa = (ind.array() * q.array()).colwise().sum().transpose();
    const Eigen::ArrayXd a_r = (row_sums.transpose() * ind).transpose().array();
    const Eigen::ArrayXd s_ab = a_r - s_aa;
    const Eigen::ArrayXd s_bb = total - 2.0 * a_r + s_aa;
    const Eigen::ArrayXd t = 2.0 * s_ab / (dn * dm) - s_aa / (dn * dn) - s_bb / (dm * dm);
    const Eigen::ArrayXd w =
        ind.row(c).transpose().array() * (0.5 / dn - 0.5 / dm) + 0.5 / dm;
    zeta += w * t;
  }
  for (Eigen::Index b = 0; b < count; ++b) out[static_cast<std::size_t>(b)] = zeta(b);
}

Labels permute_labels(std::span<const std::uint8_t> labels, std::span<const std::size_t> perm) {
  if (perm.size() != labels.size()) throw InvalidArgument("permutation length mismatch");
  Labels out(labels.size(), 2);
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] >= labels.size() || out[perm[k]] != 2)
      throw InvalidArgument("not a permutation");
    out[perm[k]] = labels[k];
  }
  return out;
}

double permuted_statistic(const GramMatrix& g, std::span<const std::uint8_t> permuted_labels,
                          GroupSizes expected, PhiKind kind) {
  check_sizes(permuted_labels, expected);
  return pbf_statistic(g, permuted_labels, kind).zeta_hat;
}

std::vector<std::size_t> random_permutation(std::size_t size, std::uint64_t seed,
                                            std::uint64_t index) {
  std::vector<std::size_t> perm(size);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  CounterRng rng(substream(seed, index));
  for (std::size_t i = size; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(perm[i - 1], perm[pick(rng)]);
  }
  return perm;
}

std::size_t choose(std::size_t n, std::size_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    // r * (n - k + i) / i is exact at every step; guard the product.
    const std::size_t f = n - k + i;
    const std::size_t g = std::gcd(r, i);
    const std::size_t rr = r / g;
    const std::size_t ii = i / g;
    const std::size_t ff = f / ii;  // ii divides f * rr, and gcd(rr, ii) = 1
    if (ff != 0 && rr > kMax / ff) return kMax;
    r = rr * ff;
  }
  return r;
}

std::vector<Labels> enumerate_assignments(std::size_t n, std::size_t m) {
  std::vector<Labels> out;
  out.reserve(choose(n + m, n));
  Labels l = block_labels(n, m);
  do {
    out.push_back(l);
  } while (std::next_permutation(l.begin(), l.end()));
  return out;
}

double upper_quantile_inf(std::vector<double> values, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (values.empty()) throw InvalidArgument("no values");
  std::sort(values.begin(), values.end());
  const double k_real = static_cast<double>(values.size()) * (1.0 - alpha);
  auto k = static_cast<std::size_t>(std::ceil(k_real - 1e-9));
  k = std::clamp<std::size_t>(k, 1, values.size());
  return values[k - 1];
}

CriticalValue critical_value(const GramMatrix& g, std::span<const std::uint8_t> labels,
                             PhiKind kind, double alpha, std::size_t budget,
                             std::size_t fallback_b, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const GroupSizes sizes = group_sizes(labels);
  const PermutationEngine engine(g, kind, sizes);
  CriticalValue cv;
  std::vector<Labels> labelings;
  if (choose(sizes.n + sizes.m, sizes.n) <= budget) {
    labelings = enumerate_assignments(sizes.n, sizes.m);
    cv.exact = true;
  } else {
    if (fallback_b == 0) throw InvalidArgument("fallback permutation count must be >= 1");
    labelings.reserve(fallback_b);
    for (std::size_t b = 0; b < fallback_b; ++b)
      labelings.push_back(permute_labels(labels, random_permutation(labels.size(), seed, b)));
  }
  cv.count = labelings.size();
  cv.value = upper_quantile_inf(engine.evaluate(labelings), alpha);
  return cv;
}

double tie_tolerance(double observed, std::span<const double> permuted) noexcept {
  double scale = std::abs(observed);
  for (double v : permuted) scale = std::max(scale, std::abs(v));
  return 1e-9 * scale;
}

TestResult exhaustive_test(const GramMatrix& g, std::span<const std::uint8_t> labels,
                           PhiKind kind, std::size_t budget, const PermutationOptions& options) {
  const GroupSizes sizes = group_sizes(labels);
  const std::size_t total = choose(sizes.n + sizes.m, sizes.n);
  if (total > budget)
    throw InvalidArgument("C(N, n) = " + std::to_string(total) +
                          " assignments exceed the enumeration budget");
  const auto labelings = enumerate_assignments(sizes.n, sizes.m);
  const PermutationEngine engine(g, kind, sizes);
  const auto stats = engine.evaluate(labelings, options.threads, options.batch);
  const StatisticValue obs = pbf_statistic(g, labels, kind);
  const double tol = tie_tolerance(obs.zeta_hat, stats);
  std::size_t hits = 0;
  for (double v : stats)
    if (v >= obs.zeta_hat - tol) ++hits;

  TestResult r;
  r.zeta_hat = obs.zeta_hat;
  r.scaled = obs.scaled;
  r.p_value = static_cast<double>(hits) / static_cast<double>(stats.size());
  r.b_used = stats.size();
  r.mode = PermutationMode::Exhaustive;
  r.phi = kind;
  r.n = sizes.n;
  r.m = sizes.m;
  if (options.keep_replicates) r.replicate_stats = stats;
  return r;
}

std::vector<TestResult> permutation_tests(const GramMatrix& g,
                                          std::span<const std::uint8_t> labels,
                                          std::span<const PhiKind> kinds, std::size_t b,
                                          std::uint64_t seed, const PermutationOptions& options) {
  if (b == 0) throw InvalidArgument("number of permutations B must be >= 1");
  if (labels.size() != g.size()) throw InvalidArgument("labels do not match Gram size");
  const GroupSizes sizes = group_sizes(labels);

  std::vector<Labels> labelings(b);
  parallel_for(b, options.threads, [&](std::size_t i) {
    labelings[i] = permute_labels(labels, random_permutation(labels.size(), seed, i));
  });

  std::vector<TestResult> results;
  results.reserve(kinds.size());
  for (PhiKind kind : kinds) {
    const PermutationEngine engine(g, kind, sizes);
    auto stats = engine.evaluate(labelings, options.threads, options.batch);
    const StatisticValue obs = pbf_statistic(g, labels, kind);
    TestResult r;
    r.zeta_hat = obs.zeta_hat;
    r.scaled = obs.scaled;
    r.p_value = p_value_randomized(obs.zeta_hat, stats);
    r.b_used = b;
    r.mode = PermutationMode::Randomized;
    r.phi = kind;
    r.n = sizes.n;
    r.m = sizes.m;
    r.seed = seed;
    if (options.keep_replicates) r.replicate_stats = std::move(stats);
    results.push_back(std::move(r));
  }
  return results;
}

TestResult permutation_test(const GramMatrix& g, std::span<const std::uint8_t> labels,
                            PhiKind kind, std::size_t b, std::uint64_t seed,
                            const PermutationOptions& options) {
  const PhiKind kinds[] = {kind};
  return std::move(permutation_tests(g, labels, kinds, b, seed, options).front());
}

TestResult permutation_test(const FunctionalSample& sample, PhiKind kind, std::size_t b,
                            std::uint64_t seed, const PermutationOptions& options) {
  if (b == 0) throw InvalidArgument("number of permutations B must be >= 1");
  const GramMatrix g = gram(sample, options.threads);
  return permutation_test(g, sample.labels(), kind, b, seed, options);
}

}  // namespace pbf
