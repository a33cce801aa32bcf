#pragma once

#include "pbf/curves.hpp"
#include "pbf/statistic.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace pbf {

/// Empirical spectrum of the centered kernel that drives the null limit of the
/// scaled statistic, n m / (n + m) * zeta_hat -> sum_k lambda_k Z_k^2.
struct KernelSpectrum {
  /// Nonincreasing; eigenvalues below 1e-12 * lambda_1 are dropped.
  std::vector<double> eigenvalues;
  /// Optional per-eigenfunction shifts sqrt(lambda) * delta * (int phi_k dL - int phi_k dF).
  std::optional<std::vector<double>> shift_means;
  std::size_t n_used = 0;
  PhiKind phi = PhiKind::L2;
  /// Limit of n / (n + m).
  double lambda_ratio = 0.5;
  /// Unit eigenvectors of the kernel matrix, one column per kept eigenvalue.
  Eigen::MatrixXd eigenvectors;
};

/// Subtracts row and column means and adds back the grand mean, in place.
/// The result is mirrored to be exactly symmetric.
void double_center(Eigen::MatrixXd& h);

/// Kernel matrix with entries
///   h(U_a, U_b) = E phi(|<U_a,U1> - <U2,U1>|^2) + E phi(|<U_b,U1> - <U2,U1>|^2)
///                 - 2 E phi(|<U_a,U1> - <U_b,U1>|^2),
/// expectations replaced by averages over the pooled sample, then doubly
/// centered so that every row, column and the grand mean vanish.
Eigen::MatrixXd empirical_h_matrix(const GramMatrix& g, PhiKind kind);

/// Eigenvalues lambda_k of H / (2N), where H is the centered kernel matrix.
/// The factor 1/2 matches the scaling of the statistic: the limit of
/// n m / (n + m) * zeta_hat is the double stochastic integral of h / 2.
KernelSpectrum spectrum_estimate(const GramMatrix& g, PhiKind kind, double lambda_ratio = 0.5);

/// Spectrum of a given centered kernel matrix H: eigenvalues of H / (2N).
KernelSpectrum spectrum_from_kernel(const Eigen::MatrixXd& h, PhiKind kind,
                                    double lambda_ratio = 0.5);

/// Values of the empirical eigenfunctions (normalized in L2 of the pooled
/// empirical law) at new points, by Nystrom extension. `cross` holds the
/// inner products <new point i, U_a> with the reference sample.
/// Returns one row per new point and one column per eigenvalue.
Eigen::MatrixXd eigenfunction_values(const KernelSpectrum& spec, const GramMatrix& reference,
                                     const Eigen::MatrixXd& cross);

/// Fills spec.shift_means from points drawn from the contaminating law L,
/// using int phi_k dF = 0 (eigenfunctions of a centered kernel).
void estimate_shift_means(KernelSpectrum& spec, const GramMatrix& reference,
                          const Eigen::MatrixXd& contaminant_cross, double delta);

/// sqrt(lambda) * delta * mean_differences[k]
std::vector<double> limit_shift(double delta, double lambda_ratio,
                                const std::vector<double>& mean_differences);

/// Monte Carlo draws of sum_k lambda_k (xi_k + shift_k)^2 with standard normal xi.
/// An absent or empty shift gives the centered law.
std::vector<double> sample_limit_law(const KernelSpectrum& spec, std::size_t draws,
                                     std::uint64_t seed,
                                     const std::optional<std::vector<double>>& shift = std::nullopt,
                                     unsigned threads = 1);

}  // namespace pbf
