#include "pbf/simgen.hpp"

#include "pbf/errors.hpp"
#include "pbf/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace pbf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

class CoeffSampler {
 public:
  explicit CoeffSampler(const CoeffDist& dist) : dist_(dist) {
    if (!std::isfinite(dist.location) || !std::isfinite(dist.scale) || dist.scale < 0.0)
      throw InvalidArgument("coefficient law needs a finite location and a scale >= 0");
    if (dist.kind == CoeffDist::Kind::StudentT && !(dist.dof > 0.0))
      throw InvalidArgument("t distribution needs dof > 0");
  }

  double operator()(CounterRng& rng) {
    switch (dist_.kind) {
      case CoeffDist::Kind::Normal:
        return dist_.location + dist_.scale * normal_(rng);
      case CoeffDist::Kind::Cauchy:
        return dist_.location +
               dist_.scale * std::tan(std::numbers::pi * (rng.uniform_open() - 0.5));
      case CoeffDist::Kind::StudentT: {
        // normal / sqrt(chi2_dof / dof); chi2 built from squared normals for integer dof.
        const double z = normal_(rng);
        double chi2 = 0.0;
        const auto whole = static_cast<int>(std::floor(dist_.dof));
        if (static_cast<double>(whole) == dist_.dof) {
          for (int i = 0; i < whole; ++i) {
            const double u = normal_(rng);
            chi2 += u * u;
          }
        } else {
          std::chi_squared_distribution<double> chi(dist_.dof);
          chi2 = chi(rng);
        }
        return dist_.location + dist_.scale * z / std::sqrt(chi2 / dist_.dof);
      }
    }
    return 0.0;
  }

 private:
  CoeffDist dist_;
  std::normal_distribution<double> normal_;
};

double mean_value(MeanShape shape, double r, double t) {
  switch (shape) {
    case MeanShape::Zero:
      return 0.0;
    case MeanShape::Linear:
      return r * t;
    case MeanShape::Quadratic:
      return r * t * t;
    case MeanShape::Exponential:
      return r * std::exp(t);
  }
  return 0.0;
}

}  // namespace

Representation representation(const GeneratorSpec& spec) {
  return std::visit(Overloaded{
                        [](const WienerSpec&) { return Representation::Grid; },
                        [](const BasisSpec&) { return Representation::Coeff; },
                        [](const SinCosSpec&) { return Representation::Coeff; },
                        [](const MixtureSpec& s) {
                          if (!s.base) throw InvalidArgument("mixture has no base law");
                          return representation(*s.base);
                        },
                    },
                    spec.kind);
}

std::size_t dimension(const GeneratorSpec& spec) {
  return std::visit(Overloaded{
                        [](const WienerSpec& s) { return s.grid.size(); },
                        [](const BasisSpec& s) { return s.weights.size(); },
                        [](const SinCosSpec& s) { return 2 * s.d; },
                        [](const MixtureSpec& s) {
                          if (!s.base) throw InvalidArgument("mixture has no base law");
                          return dimension(*s.base);
                        },
                    },
                    spec.kind);
}

Eigen::MatrixXd generate(const GeneratorSpec& spec, std::size_t count, std::uint64_t seed) {
  return std::visit(
      Overloaded{
          [&](const WienerSpec& s) { return gen_shifted_wiener(count, s.mean, s.r, s.grid, seed); },
          [&](const BasisSpec& s) { return gen_basis(count, s.weights, s.dist, seed); },
          [&](const SinCosSpec& s) {
            return gen_sincos(count, s.d, s.side, s.dist, seed, s.normalized_cos);
          },
          [&](const MixtureSpec& s) {
            if (!s.base || !s.contaminant) throw InvalidArgument("mixture needs two laws");
            return gen_mixture(count, *s.base, *s.contaminant, s.delta, seed).rows;
          },
      },
      spec.kind);
}

Eigen::MatrixXd gen_wiener(std::size_t count, const GridSpec& grid, std::uint64_t seed) {
  return gen_shifted_wiener(count, MeanShape::Zero, 0.0, grid, seed);
}

Eigen::MatrixXd gen_shifted_wiener(std::size_t count, MeanShape mean, double r,
                                   const GridSpec& grid, std::uint64_t seed) {
  if (!grid.is_equispaced()) throw InvalidArgument("Wiener paths need an equispaced grid");
  if (grid.points().front() < 0.0) throw InvalidArgument("Wiener paths start at t >= 0");
  const auto& t = grid.points();
  const auto len = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), len);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(substream(seed, i));
    std::normal_distribution<double> normal;
    const auto row = static_cast<Eigen::Index>(i);
    double w = t[0] > 0.0 ? std::sqrt(t[0]) * normal(rng) : 0.0;
    out(row, 0) = w;
    for (Eigen::Index j = 1; j < len; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      w += std::sqrt(t[uj] - t[uj - 1]) * normal(rng);
      out(row, j) = w;
    }
    if (mean != MeanShape::Zero)
      for (Eigen::Index j = 0; j < len; ++j)
        out(row, j) += mean_value(mean, r, t[static_cast<std::size_t>(j)]);
  }
  return out;
}

Eigen::MatrixXd gen_basis(std::size_t count, const std::vector<double>& weights,
                          const CoeffDist& dist, std::uint64_t seed) {
  if (weights.empty()) throw InvalidArgument("basis generator needs at least one weight");
  for (double w : weights)
    if (!std::isfinite(w)) throw InvalidArgument("basis weights must be finite");
  const auto dim = static_cast<Eigen::Index>(weights.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(count), dim);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(substream(seed, i));
    CoeffSampler draw(dist);
    for (Eigen::Index j = 0; j < dim; ++j)
      out(static_cast<Eigen::Index>(i), j) = weights[static_cast<std::size_t>(j)] * draw(rng);
  }
  return out;
}

Eigen::MatrixXd gen_sincos(std::size_t count, std::size_t d, TrigSide side,
                           const CoeffDist& dist, std::uint64_t seed, bool normalized_cos) {
  if (d == 0) throw InvalidArgument("sin/cos generator needs d >= 1");
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  // cos(2 pi i t) has L2 norm 1/sqrt(2) unless the sqrt(2) factor is restored.
  const double cos_norm = normalized_cos ? 1.0 : std::numbers::sqrt2 / 2.0;
  const auto dd = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count), 2 * dd);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(substream(seed, i));
    CoeffSampler draw(dist);
    const auto row = static_cast<Eigen::Index>(i);
    for (Eigen::Index j = 0; j < dd; ++j) {
      if (side == TrigSide::Sin)
        out(row, j) = w * draw(rng);
      else
        out(row, dd + j) = w * cos_norm * draw(rng);
    }
  }
  return out;
}

MixtureDraw gen_mixture(std::size_t count, const GeneratorSpec& base,
                        const GeneratorSpec& contaminant, double delta, std::uint64_t seed) {
  if (count == 0) return {Eigen::MatrixXd(0, static_cast<Eigen::Index>(dimension(base))), {}};
  const double rate = delta / std::sqrt(static_cast<double>(count));
  if (!(rate >= 0.0 && rate <= 1.0))
    throw InvalidArgument("mixing rate delta / sqrt(count) must lie in [0, 1]");
  if (representation(base) != representation(contaminant) ||
      dimension(base) != dimension(contaminant))
    throw InvalidArgument("mixture components must share representation and dimension");

  // Both components draw every row from their own substream; the coin picks one.
  const Eigen::MatrixXd from_base = generate(base, count, substream(seed, 0));
  const Eigen::MatrixXd from_cont = generate(contaminant, count, substream(seed, 1));
  MixtureDraw out{Eigen::MatrixXd(from_base.rows(), from_base.cols()),
                  std::vector<std::uint8_t>(count, 0)};
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng coin(substream(substream(seed, 2), i));
    const bool hit = coin.uniform_open() < rate;
    out.contaminated[i] = hit ? 1 : 0;
    const auto row = static_cast<Eigen::Index>(i);
    out.rows.row(row) = hit ? from_cont.row(row) : from_base.row(row);
  }
  return out;
}

std::vector<double> power_weights(std::size_t count, double power) {
  std::vector<double> w(count);
  for (std::size_t i = 0; i < count; ++i) w[i] = std::pow(static_cast<double>(i + 1), -power);
  return w;
}

double trig_basis(std::size_t index, double t) {
  if (index == 0) throw InvalidArgument("trigonometric basis is indexed from 1");
  if (index == 1) return 1.0;
  const double k = static_cast<double>(index / 2);
  const double arg = 2.0 * std::numbers::pi * k * t;
  return std::numbers::sqrt2 * (index % 2 == 0 ? std::cos(arg) : std::sin(arg));
}

Eigen::MatrixXd evaluate_trig_basis(const Eigen::MatrixXd& coefficients, const GridSpec& grid) {
  const auto dim = coefficients.cols();
  const auto len = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd basis(dim, len);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < len; ++j)
      basis(i, j) = trig_basis(static_cast<std::size_t>(i + 1),
                               grid.points()[static_cast<std::size_t>(j)]);
  return coefficients * basis;
}

}  // namespace pbf
