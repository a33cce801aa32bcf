#include "pbf/statistic.hpp"

#include "pbf/errors.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

namespace pbf {

namespace {

void check_labels(std::size_t size, std::span<const std::uint8_t> labels) {
  if (labels.size() != size)
    throw InvalidArgument("expected " + std::to_string(size) + " labels, got " +
                          std::to_string(labels.size()));
}

// Sums of |p_j - p_k| over unordered within-group pairs and over cross pairs.
struct AbsDiffSums {
  double within_a = 0.0;
  double within_b = 0.0;
  double cross = 0.0;
};

AbsDiffSums abs_diff_sums(std::span<const double> p, std::span<const std::uint8_t> labels) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  AbsDiffSums s;
  double count[2] = {0.0, 0.0};
  double sum[2] = {0.0, 0.0};
  for (std::size_t idx : order) {
    const double v = p[idx];
    const int g = labels[idx];
    const int o = 1 - g;
    (g == 0 ? s.within_a : s.within_b) += count[g] * v - sum[g];
    s.cross += count[o] * v - sum[o];
    count[g] += 1.0;
    sum[g] += v;
  }
  return s;
}

}  // namespace

std::string_view to_string(PhiKind kind) {
  switch (kind) {
    case PhiKind::L2:
      return "l2";
    case PhiKind::Exp:
      return "exp";
    case PhiKind::Log:
      return "log";
  }
  return "?";
}

PhiKind parse_phi(std::string_view text) {
  if (text == "l2" || text == "L2") return PhiKind::L2;
  if (text == "exp") return PhiKind::Exp;
  if (text == "log") return PhiKind::Log;
  throw InvalidArgument("unknown phi '" + std::string(text) + "' (l2|exp|log)");
}

double phi_eval(PhiKind kind, double z) {
  if (!(z >= 0.0)) throw InvalidArgument("phi is defined on [0, inf)");
  return phi_unchecked(kind, z);
}

double scale_factor(std::size_t n, std::size_t m) noexcept {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return dn * dm / (dn + dm);
}

double bf_statistic_1d(std::span<const double> p, std::span<const std::uint8_t> labels,
                       PhiKind kind) {
  check_labels(p.size(), labels);
  const auto [n, m] = group_sizes(labels);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);

  double s_aa = 0.0;  // ordered pairs
  double s_bb = 0.0;
  double s_ab = 0.0;  // pairs (j in A, k in B)
  if (kind == PhiKind::L2) {
    const AbsDiffSums s = abs_diff_sums(p, labels);
    s_aa = s.within_a;  // 2 * sum_{j<k} |d| / 2
    s_bb = s.within_b;
    s_ab = 0.5 * s.cross;
  } else {
    const std::size_t size = p.size();
    for (std::size_t j = 0; j < size; ++j) {
      for (std::size_t k = j + 1; k < size; ++k) {
        const double d = p[j] - p[k];
        const double v = phi_unchecked(kind, d * d);
        if (labels[j] != labels[k])
          s_ab += v;
        else if (labels[j] == 0)
          s_aa += 2.0 * v;
        else
          s_bb += 2.0 * v;
      }
    }
  }
  return 2.0 * s_ab / (dn * dm) - (s_aa / (dn * dn) + s_bb / (dm * dm));
}

StatisticValue pbf_statistic(const GramMatrix& g, std::span<const std::uint8_t> labels,
                             PhiKind kind) {
  const std::size_t size = g.size();
  check_labels(size, labels);
  const auto [n, m] = group_sizes(labels);
  const double w[2] = {0.5 / static_cast<double>(n), 0.5 / static_cast<double>(m)};
  double zeta = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const auto col = g.values.col(static_cast<Eigen::Index>(i));
    const std::span<const double> proj(col.data(), size);
    zeta += w[labels[i]] * bf_statistic_1d(proj, labels, kind);
  }
  return {zeta, zeta * scale_factor(n, m)};
}

double pbf_statistic_oracle(const GramMatrix& g, std::span<const std::uint8_t> labels,
                            PhiKind kind) {
  check_labels(g.size(), labels);
  std::vector<std::size_t> xs;
  std::vector<std::size_t> ys;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 0 ? xs : ys).push_back(i);
  if (xs.empty() || ys.empty()) throw InvalidArgument("both groups need at least one curve");
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());

  auto f = [&](std::size_t a, std::size_t b, std::size_t dir) {
    const double d = g(a, dir) - g(b, dir);
    return phi_eval(kind, d * d);
  };
  auto triple = [&](const std::vector<std::size_t>& dirs, const std::vector<std::size_t>& js,
                    const std::vector<std::size_t>& ks) {
    double s = 0.0;
    for (std::size_t i : dirs)
      for (std::size_t j : js)
        for (std::size_t k : ks) s += f(j, k, i);
    return s;
  };

  return triple(xs, xs, ys) / (n * n * m)            //
         - triple(xs, xs, xs) / (2.0 * n * n * n)    //
         - triple(xs, ys, ys) / (2.0 * n * m * m)    //
         + triple(ys, xs, ys) / (n * m * m)          //
         - triple(ys, xs, xs) / (2.0 * n * n * m)    //
         - triple(ys, ys, ys) / (2.0 * m * m * m);
}

}  // namespace pbf
