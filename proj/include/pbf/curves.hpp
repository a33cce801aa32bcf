#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace pbf {

enum class Representation { Grid, Coeff };
enum class Quadrature { Trapezoid, RiemannLeft };

std::string_view to_string(Representation r);
std::string_view to_string(Quadrature q);
Representation parse_representation(std::string_view text);
Quadrature parse_quadrature(std::string_view text);

/// Shared abscissae of grid-sampled curves plus the rule used to integrate
/// products of curves over them.
class GridSpec {
 public:
  GridSpec(std::vector<double> points, Quadrature rule = Quadrature::Trapezoid);

  static GridSpec equispaced(std::size_t count, double lo = 0.0, double hi = 1.0,
                             Quadrature rule = Quadrature::Trapezoid);

  const std::vector<double>& points() const noexcept { return points_; }
  Quadrature rule() const noexcept { return rule_; }
  std::size_t size() const noexcept { return points_.size(); }
  /// Quadrature weights w such that the integral of a*b is sum_i w_i a_i b_i.
  const std::vector<double>& weights() const noexcept { return weights_; }
  /// True when consecutive spacings agree to 1e-9 relative.
  bool is_equispaced() const;

 private:
  std::vector<double> points_;
  Quadrature rule_;
  std::vector<double> weights_;
};

struct Curve {
  Representation kind = Representation::Coeff;
  std::vector<double> values;
};

/// <a, b>: exact dot product for coefficient curves, quadrature over the grid
/// for sampled curves. `grid` must be given iff the curves are Grid kind.
double inner_product(const Curve& a, const Curve& b, const GridSpec* grid = nullptr);

/// Group membership per pooled index: 0 for the first sample, 1 for the second.
using Labels = std::vector<std::uint8_t>;

/// Labels for n first-sample curves followed by m second-sample curves.
Labels block_labels(std::size_t n, std::size_t m);

struct GroupSizes {
  std::size_t n = 0;
  std::size_t m = 0;
};

/// Counts both groups; throws if any label is not 0 or 1 or a group is empty.
GroupSizes group_sizes(std::span<const std::uint8_t> labels);

/// A pooled two-sample set of curves. Rows of `data` are curves.
class FunctionalSample {
 public:
  FunctionalSample(Representation kind, Eigen::MatrixXd data, Labels labels,
                   std::optional<GridSpec> grid = std::nullopt);

  /// Stacks x above y and labels them 0 / 1.
  static FunctionalSample from_groups(Representation kind, const Eigen::MatrixXd& x,
                                      const Eigen::MatrixXd& y,
                                      std::optional<GridSpec> grid = std::nullopt);

  Representation kind() const noexcept { return kind_; }
  const Eigen::MatrixXd& data() const noexcept { return data_; }
  const Labels& labels() const noexcept { return labels_; }
  const std::optional<GridSpec>& grid() const noexcept { return grid_; }
  const GridSpec* grid_ptr() const noexcept { return grid_ ? &*grid_ : nullptr; }

  std::size_t size() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(data_.cols()); }
  std::size_t n() const noexcept { return sizes_.n; }
  std::size_t m() const noexcept { return sizes_.m; }

  Curve curve(std::size_t i) const;
  /// Rows belonging to group `g` in pooled order.
  Eigen::MatrixXd group(std::uint8_t g) const;

 private:
  Representation kind_;
  Eigen::MatrixXd data_;
  Labels labels_;
  std::optional<GridSpec> grid_;
  GroupSizes sizes_;
};

/// Symmetric matrix of all pairwise inner products of a pooled sample.
struct GramMatrix {
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
  double operator()(std::size_t a, std::size_t b) const {
    return values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
};

/// Gram matrix of the rows of `rows`. Entries are computed for a <= b and
/// mirrored, so the result is bit-exactly symmetric.
GramMatrix gram(const Eigen::MatrixXd& rows, Representation kind,
                const GridSpec* grid = nullptr, unsigned threads = 1);

GramMatrix gram(const FunctionalSample& sample, unsigned threads = 1);

/// Inner products <a_i, b_j> between the rows of two curve sets.
Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           Representation kind, const GridSpec* grid = nullptr);

/// Number of Gram computations performed by this process so far.
std::uint64_t gram_evaluations() noexcept;

}  // namespace pbf
