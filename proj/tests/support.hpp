#pragma once

#include "pbf/curves.hpp"
#include "pbf/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace pbf::testing {

inline Eigen::MatrixXd random_rows(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  CounterRng rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = normal(rng);
  return out;
}

inline GramMatrix random_gram(std::size_t size, std::size_t dim, std::uint64_t seed) {
  return gram(random_rows(size, dim, seed), Representation::Coeff);
}

// Uniformly random orthogonal matrix from the QR factors of a Gaussian matrix.
inline Eigen::MatrixXd random_orthogonal(std::size_t dim, std::uint64_t seed) {
  const Eigen::MatrixXd a = random_rows(dim, dim, seed);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::abs(b));
}

}  // namespace pbf::testing
