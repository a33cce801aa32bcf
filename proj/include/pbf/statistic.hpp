#pragma once

#include "pbf/curves.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

namespace pbf {

/// Kernel transform applied to squared projection differences:
///   L2:  phi(z) = sqrt(z) / 2
///   Exp: phi(z) = 1 - exp(-z / 2)
///   Log: phi(z) = log(1 + z)
enum class PhiKind { L2, Exp, Log };

inline constexpr PhiKind kAllPhis[] = {PhiKind::L2, PhiKind::Exp, PhiKind::Log};

std::string_view to_string(PhiKind kind);
/// Accepts l2 | exp | log.
PhiKind parse_phi(std::string_view text);

/// phi(z) without the domain check, for inner loops.
inline double phi_unchecked(PhiKind kind, double z) noexcept {
  switch (kind) {
    case PhiKind::L2:
      return 0.5 * std::sqrt(z);
    case PhiKind::Exp:
      return -std::expm1(-0.5 * z);
    case PhiKind::Log:
      return std::log1p(z);
  }
  return 0.0;
}

/// phi(z); throws InvalidArgument for negative or NaN z.
double phi_eval(PhiKind kind, double z);

struct StatisticValue {
  double zeta_hat = 0.0;
  /// zeta_hat * n * m / (n + m)
  double scaled = 0.0;
};

/// n * m / (n + m)
double scale_factor(std::size_t n, std::size_t m) noexcept;

/// Energy-type two-sample statistic of one projected sample:
///   2/(nm) sum_{A x B} phi(d^2) - 1/n^2 sum_{A x A} phi(d^2) - 1/m^2 sum_{B x B} phi(d^2)
/// where d = p_j - p_k and A / B are the indices labelled 0 / 1.
/// The L2 kernel is evaluated in O(N log N) through sorted prefix sums.
double bf_statistic_1d(std::span<const double> projections, std::span<const std::uint8_t> labels,
                       PhiKind kind);

/// Projected statistic from a Gram matrix: the 1-d statistic along every pooled
/// curve as projection direction (column i of G), averaged with weight 1/(2n)
/// over first-sample directions and 1/(2m) over second-sample directions.
StatisticValue pbf_statistic(const GramMatrix& g, std::span<const std::uint8_t> labels,
                             PhiKind kind);

/// Reference evaluation by the six explicit triple sums over (direction, j, k).
/// O(N^3) and shares no code with pbf_statistic; meant for cross-checking.
double pbf_statistic_oracle(const GramMatrix& g, std::span<const std::uint8_t> labels,
                            PhiKind kind);

}  // namespace pbf
