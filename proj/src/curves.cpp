#include "pbf/curves.hpp"

#include "pbf/errors.hpp"
#include "pbf/parallel.hpp"

#include <atomic>
#include <cmath>
#include <string>

namespace pbf {

namespace {

std::atomic<std::uint64_t> g_gram_count{0};

std::vector<double> quadrature_weights(const std::vector<double>& t, Quadrature rule) {
  const std::size_t k = t.size();
  std::vector<double> w(k, 0.0);
  if (rule == Quadrature::Trapezoid) {
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const double half = 0.5 * (t[i + 1] - t[i]);
      w[i] += half;
      w[i + 1] += half;
    }
  } else {
    for (std::size_t i = 0; i + 1 < k; ++i) w[i] = t[i + 1] - t[i];
  }
  return w;
}

Eigen::MatrixXd weighted_rows(const Eigen::MatrixXd& rows, Representation kind,
                              const GridSpec* grid) {
  if (kind == Representation::Coeff) {
    if (grid != nullptr) throw InvalidArgument("coefficient curves take no grid");
    return rows;
  }
  if (grid == nullptr) throw InvalidArgument("grid curves need a GridSpec");
  if (static_cast<std::size_t>(rows.cols()) != grid->size())
    throw InvalidArgument("curve length " + std::to_string(rows.cols()) +
                          " does not match grid length " + std::to_string(grid->size()));
  const Eigen::Map<const Eigen::RowVectorXd> w(grid->weights().data(),
                                               static_cast<Eigen::Index>(grid->size()));
  return rows.array().rowwise() * w.array();
}

}  // namespace

std::string_view to_string(Representation r) {
  return r == Representation::Grid ? "grid" : "coeff";
}

std::string_view to_string(Quadrature q) {
  return q == Quadrature::Trapezoid ? "trapezoid" : "riemann-left";
}

Representation parse_representation(std::string_view text) {
  if (text == "grid") return Representation::Grid;
  if (text == "coeff") return Representation::Coeff;
  throw InvalidArgument("unknown representation '" + std::string(text) + "' (grid|coeff)");
}

Quadrature parse_quadrature(std::string_view text) {
  if (text == "trapezoid") return Quadrature::Trapezoid;
  if (text == "riemann-left") return Quadrature::RiemannLeft;
  throw InvalidArgument("unknown quadrature '" + std::string(text) +
                        "' (trapezoid|riemann-left)");
}

GridSpec::GridSpec(std::vector<double> points, Quadrature rule)
    : points_(std::move(points)), rule_(rule) {
  if (points_.size() < 2) throw InvalidArgument("grid needs at least 2 points");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw InvalidArgument("grid point is not finite");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw InvalidArgument("grid points must be strictly increasing");
  }
  weights_ = quadrature_weights(points_, rule_);
}

GridSpec GridSpec::equispaced(std::size_t count, double lo, double hi, Quadrature rule) {
  if (count < 2) throw InvalidArgument("grid needs at least 2 points");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return GridSpec(std::move(t), rule);
}

bool GridSpec::is_equispaced() const {
  const double h = points_[1] - points_[0];
  for (std::size_t i = 2; i < points_.size(); ++i)
    if (std::abs((points_[i] - points_[i - 1]) - h) > 1e-9 * std::abs(h)) return false;
  return true;
}

double inner_product(const Curve& a, const Curve& b, const GridSpec* grid) {
  if (a.kind != b.kind) throw InvalidArgument("curves have different representations");
  if (a.values.size() != b.values.size())
    throw InvalidArgument("curve dimension mismatch: " + std::to_string(a.values.size()) +
                          " vs " + std::to_string(b.values.size()));
  double s = 0.0;
  if (a.kind == Representation::Coeff) {
    if (grid != nullptr) throw InvalidArgument("coefficient curves take no grid");
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
  }
  if (grid == nullptr) throw InvalidArgument("grid curves need a GridSpec");
  if (grid->size() != a.values.size())
    throw InvalidArgument("curve length does not match grid length");
  const auto& w = grid->weights();
  for (std::size_t i = 0; i < a.values.size(); ++i) s += w[i] * a.values[i] * b.values[i];
  return s;
}

Labels block_labels(std::size_t n, std::size_t m) {
  Labels labels(n + m, 0);
  std::fill(labels.begin() + static_cast<std::ptrdiff_t>(n), labels.end(), 1);
  return labels;
}

GroupSizes group_sizes(std::span<const std::uint8_t> labels) {
  GroupSizes s;
  for (auto l : labels) {
    if (l == 0)
      ++s.n;
    else if (l == 1)
      ++s.m;
    else
      throw InvalidArgument("labels must be 0 or 1");
  }
  if (s.n == 0 || s.m == 0) throw InvalidArgument("both groups need at least one curve");
  return s;
}

FunctionalSample::FunctionalSample(Representation kind, Eigen::MatrixXd data, Labels labels,
                                   std::optional<GridSpec> grid)
    : kind_(kind), data_(std::move(data)), labels_(std::move(labels)), grid_(std::move(grid)) {
  if (static_cast<std::size_t>(data_.rows()) != labels_.size())
    throw InvalidArgument("one label per curve is required");
  if (data_.cols() == 0) throw InvalidArgument("curves must have at least one value");
  sizes_ = group_sizes(labels_);
  if (kind_ == Representation::Grid) {
    if (!grid_) throw InvalidArgument("grid curves need a GridSpec");
    if (grid_->size() != dimension())
      throw InvalidArgument("curve length does not match grid length");
  } else if (grid_) {
    throw InvalidArgument("coefficient curves take no grid");
  }
  if (!data_.allFinite()) throw DataError("curve values must be finite");
}

FunctionalSample FunctionalSample::from_groups(Representation kind, const Eigen::MatrixXd& x,
                                               const Eigen::MatrixXd& y,
                                               std::optional<GridSpec> grid) {
  if (x.cols() != y.cols()) throw InvalidArgument("samples have different dimensions");
  Eigen::MatrixXd pooled(x.rows() + y.rows(), x.cols());
  pooled << x, y;
  return FunctionalSample(kind, std::move(pooled),
                          block_labels(static_cast<std::size_t>(x.rows()),
                                       static_cast<std::size_t>(y.rows())),
                          std::move(grid));
}

Curve FunctionalSample::curve(std::size_t i) const {
  const auto row = data_.row(static_cast<Eigen::Index>(i));
  return Curve{kind_, std::vector<double>(row.begin(), row.end())};
}

Eigen::MatrixXd FunctionalSample::group(std::uint8_t g) const {
  const std::size_t count = g == 0 ? sizes_.n : sizes_.m;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), data_.cols());
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == g) out.row(r++) = data_.row(static_cast<Eigen::Index>(i));
  return out;
}

GramMatrix gram(const Eigen::MatrixXd& rows, Representation kind, const GridSpec* grid,
                unsigned threads) {
  const Eigen::MatrixXd weighted = weighted_rows(rows, kind, grid);
  const Eigen::Index n = rows.rows();
  GramMatrix g{Eigen::MatrixXd(n, n)};
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t ia) {
    const auto a = static_cast<Eigen::Index>(ia);
    for (Eigen::Index b = a; b < n; ++b) g.values(a, b) = rows.row(a).dot(weighted.row(b));
  });
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) g.values(b, a) = g.values(a, b);
  g_gram_count.fetch_add(1, std::memory_order_relaxed);
  return g;
}

GramMatrix gram(const FunctionalSample& sample, unsigned threads) {
  return gram(sample.data(), sample.kind(), sample.grid_ptr(), threads);
}

Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           Representation kind, const GridSpec* grid) {
  if (a.cols() != b.cols()) throw InvalidArgument("curve dimension mismatch");
  return a * weighted_rows(b, kind, grid).transpose();
}

std::uint64_t gram_evaluations() noexcept {
  return g_gram_count.load(std::memory_order_relaxed);
}

}  // namespace pbf
