#pragma once

#include "pbf/curves.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

namespace pbf {

/// Coefficient law. Normal(location, scale) uses scale as the standard
/// deviation; Cauchy and StudentT are centered at `location` and multiplied by
/// `scale`.
struct CoeffDist {
  enum class Kind { Normal, Cauchy, StudentT };
  Kind kind = Kind::Normal;
  double location = 0.0;
  double scale = 1.0;
  double dof = 4.0;

  static CoeffDist normal(double mean, double sd) { return {Kind::Normal, mean, sd, 0.0}; }
  static CoeffDist cauchy(double scale) { return {Kind::Cauchy, 0.0, scale, 0.0}; }
  static CoeffDist student_t(double dof) { return {Kind::StudentT, 0.0, 1.0, dof}; }
};

/// Mean function added to Wiener paths.
enum class MeanShape {
  Zero,         // 0
  Linear,       // r * t
  Quadratic,    // r * t^2
  Exponential,  // r * e^t
};

enum class TrigSide { Sin, Cos };

struct WienerSpec {
  GridSpec grid = GridSpec::equispaced(101);
  MeanShape mean = MeanShape::Zero;
  double r = 0.0;
};

/// sum_i weights[i] * xi_i * psi_i with psi the trigonometric basis
/// psi_1 = 1, psi_{2k} = sqrt(2) cos(2 pi k t), psi_{2k+1} = sqrt(2) sin(2 pi k t).
struct BasisSpec {
  std::vector<double> weights;
  CoeffDist dist;
};

/// sin side: sum_i d^{-1/2} xi_i sqrt(2) sin(2 pi i t);
/// cos side: sum_i d^{-1/2} eta_i cos(2 pi i t), or with sqrt(2) when normalized_cos.
/// Coordinates live in a 2d-dimensional orthonormal frame: sin terms first.
struct SinCosSpec {
  std::size_t d = 1;
  TrigSide side = TrigSide::Sin;
  CoeffDist dist = CoeffDist::normal(0.0, 1.0);
  bool normalized_cos = false;
};

struct GeneratorSpec;

/// Each curve comes from `contaminant` with probability delta / sqrt(count),
/// otherwise from `base`.
struct MixtureSpec {
  std::shared_ptr<const GeneratorSpec> base;
  std::shared_ptr<const GeneratorSpec> contaminant;
  double delta = 0.0;
};

struct GeneratorSpec {
  std::variant<WienerSpec, BasisSpec, SinCosSpec, MixtureSpec> kind;
};

Representation representation(const GeneratorSpec& spec);
std::size_t dimension(const GeneratorSpec& spec);

/// Curves as rows. Row i depends only on (spec, seed, i), not on `count`.
Eigen::MatrixXd generate(const GeneratorSpec& spec, std::size_t count, std::uint64_t seed);

Eigen::MatrixXd gen_wiener(std::size_t count, const GridSpec& grid, std::uint64_t seed);
Eigen::MatrixXd gen_shifted_wiener(std::size_t count, MeanShape mean, double r,
                                   const GridSpec& grid, std::uint64_t seed);
/// Coefficient i of every curve is weights[i] times a draw from `dist`.
Eigen::MatrixXd gen_basis(std::size_t count, const std::vector<double>& weights,
                          const CoeffDist& dist, std::uint64_t seed);
Eigen::MatrixXd gen_sincos(std::size_t count, std::size_t d, TrigSide side,
                           const CoeffDist& dist, std::uint64_t seed, bool normalized_cos = false);

struct MixtureDraw {
  Eigen::MatrixXd rows;
  /// 1 where the curve came from the contaminant.
  std::vector<std::uint8_t> contaminated;
};

MixtureDraw gen_mixture(std::size_t count, const GeneratorSpec& base,
                        const GeneratorSpec& contaminant, double delta, std::uint64_t seed);

/// (1 / i^power) for i = 1..count.
std::vector<double> power_weights(std::size_t count, double power);

/// psi_index(t) for the trigonometric basis, index starting at 1.
double trig_basis(std::size_t index, double t);

/// Samples coefficient curves of the trigonometric basis on a grid.
Eigen::MatrixXd evaluate_trig_basis(const Eigen::MatrixXd& coefficients, const GridSpec& grid);

}  // namespace pbf
