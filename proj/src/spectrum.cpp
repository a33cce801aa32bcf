#include "pbf/spectrum.hpp"

#include "pbf/errors.hpp"
#include "pbf/parallel.hpp"
#include "pbf/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace pbf {

namespace {

// K(a, b) = (1/N) sum_c phi(|G(a,c) - G(b,c)|^2)
Eigen::MatrixXd mean_phi_distance(const GramMatrix& g, PhiKind kind) {
  const auto size = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(size, size);
  for (Eigen::Index c = 0; c < size; ++c) {
    const auto col = g.values.col(c);
    for (Eigen::Index b = 0; b < size; ++b)
      for (Eigen::Index a = b + 1; a < size; ++a) {
        const double d = col(a) - col(b);
        k(a, b) += phi_unchecked(kind, d * d);
      }
  }
  k /= static_cast<double>(size);
  for (Eigen::Index b = 0; b < size; ++b)
    for (Eigen::Index a = b + 1; a < size; ++a) k(b, a) = k(a, b);
  return k;
}

}  // namespace

void double_center(Eigen::MatrixXd& h) {
  const Eigen::VectorXd row_means = h.rowwise().mean();
  const double grand = row_means.mean();
  const Eigen::Index size = h.rows();
  for (Eigen::Index b = 0; b < size; ++b)
    for (Eigen::Index a = 0; a < size; ++a)
      h(a, b) = h(a, b) - row_means(a) - row_means(b) + grand;
  // Mirror to keep exact symmetry after rounding.
  for (Eigen::Index b = 0; b < size; ++b)
    for (Eigen::Index a = b + 1; a < size; ++a) h(b, a) = h(a, b);
}

Eigen::MatrixXd empirical_h_matrix(const GramMatrix& g, PhiKind kind) {
  const auto size = static_cast<Eigen::Index>(g.size());
  if (size == 0) throw InvalidArgument("empty Gram matrix");
  const Eigen::MatrixXd k = mean_phi_distance(g, kind);
  // E_{U1,U2} phi(|<u,U1> - <U2,U1>|^2) at u = U_a is the row mean of k.
  const Eigen::VectorXd spread = k.rowwise().mean();
  Eigen::MatrixXd h(size, size);
  for (Eigen::Index b = 0; b < size; ++b)
    for (Eigen::Index a = 0; a < size; ++a) h(a, b) = spread(a) + spread(b) - 2.0 * k(a, b);
  double_center(h);
  return h;
}

KernelSpectrum spectrum_estimate(const GramMatrix& g, PhiKind kind, double lambda_ratio) {
  if (g.size() < 3) throw InvalidArgument("spectrum needs at least 3 curves");
  return spectrum_from_kernel(empirical_h_matrix(g, kind), kind, lambda_ratio);
}

KernelSpectrum spectrum_from_kernel(const Eigen::MatrixXd& h, PhiKind kind, double lambda_ratio) {
  if (h.rows() != h.cols() || h.rows() == 0) throw InvalidArgument("kernel matrix must be square");
  if (!(lambda_ratio > 0.0 && lambda_ratio < 1.0))
    throw InvalidArgument("lambda ratio must lie in (0, 1)");
  if (!h.allFinite()) throw NumericalError("kernel matrix has non-finite entries");
  const double size = static_cast<double>(h.rows());
  const Eigen::MatrixXd op = h / (2.0 * size);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigensolver did not converge");

  KernelSpectrum spec;
  spec.n_used = static_cast<std::size_t>(h.rows());
  spec.phi = kind;
  spec.lambda_ratio = lambda_ratio;
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::Index total = values.size();
  const double top = values(total - 1);
  if (!(top > 0.0)) return spec;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = total - 1; i >= 0; --i) {
    if (values(i) < 1e-12 * top) break;
    kept.push_back(i);
  }
  spec.eigenvectors.resize(total, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    spec.eigenvalues.push_back(values(kept[k]));
    spec.eigenvectors.col(static_cast<Eigen::Index>(k)) = solver.eigenvectors().col(kept[k]);
  }
  return spec;
}

Eigen::MatrixXd eigenfunction_values(const KernelSpectrum& spec, const GramMatrix& reference,
                                     const Eigen::MatrixXd& cross) {
  const auto size = static_cast<Eigen::Index>(reference.size());
  if (spec.n_used != reference.size() || spec.eigenvectors.rows() != size)
    throw InvalidArgument("spectrum was not estimated from this reference sample");
  if (cross.cols() != size) throw InvalidArgument("cross inner products have wrong width");
  const Eigen::MatrixXd k_ref = mean_phi_distance(reference, spec.phi);
  const Eigen::VectorXd ref_row_means = k_ref.rowwise().mean();
  const double ref_grand = ref_row_means.mean();

  // Centered kernel kt(u, U_a) = -(K(u,a) - mean_b K(u,b) - mean_d K(d,a) + grand),
  // where K(u, a) = (1/N) sum_c phi(|<u,U_c> - <U_a,U_c>|^2). kt equals H / 2.
  const Eigen::Index points = cross.rows();
  Eigen::MatrixXd kt(points, size);
  for (Eigen::Index i = 0; i < points; ++i) {
    for (Eigen::Index a = 0; a < size; ++a) {
      double s = 0.0;
      for (Eigen::Index c = 0; c < size; ++c) {
        const double d = cross(i, c) - reference.values(a, c);
        s += phi_unchecked(spec.phi, d * d);
      }
      kt(i, a) = s / static_cast<double>(size);
    }
    const double row_mean = kt.row(i).mean();
    for (Eigen::Index a = 0; a < size; ++a)
      kt(i, a) = -(kt(i, a) - row_mean - ref_row_means(a) + ref_grand);
  }
  // psi_k(u) = (1 / (N mu_k)) sum_a kt(u, U_a) psi_k(U_a), psi_k(U_a) = sqrt(N) v_k[a].
  const double dn = static_cast<double>(size);
  Eigen::MatrixXd out = kt * spec.eigenvectors * std::sqrt(dn) / dn;
  for (Eigen::Index k = 0; k < out.cols(); ++k)
    out.col(k) /= spec.eigenvalues[static_cast<std::size_t>(k)];
  return out;
}

void estimate_shift_means(KernelSpectrum& spec, const GramMatrix& reference,
                          const Eigen::MatrixXd& contaminant_cross, double delta) {
  if (contaminant_cross.rows() == 0) throw InvalidArgument("no contaminant points");
  const Eigen::MatrixXd values = eigenfunction_values(spec, reference, contaminant_cross);
  const Eigen::VectorXd means = values.colwise().mean().transpose();
  spec.shift_means = limit_shift(delta, spec.lambda_ratio,
                                 std::vector<double>(means.data(), means.data() + means.size()));
}

std::vector<double> limit_shift(double delta, double lambda_ratio,
                                const std::vector<double>& mean_differences) {
  std::vector<double> out(mean_differences.size());
  const double factor = std::sqrt(lambda_ratio) * delta;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = factor * mean_differences[k];
  return out;
}

std::vector<double> sample_limit_law(const KernelSpectrum& spec, std::size_t draws,
                                     std::uint64_t seed,
                                     const std::optional<std::vector<double>>& shift,
                                     unsigned threads) {
  if (draws == 0) throw InvalidArgument("draws must be >= 1");
  const bool shifted = shift && !shift->empty();
  if (shifted && shift->size() != spec.eigenvalues.size())
    throw InvalidArgument("shift has one entry per eigenvalue");
  std::vector<double> out(draws, 0.0);
  if (spec.eigenvalues.empty()) return out;
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (draws + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t ci) {
    CounterRng rng(substream(seed, ci));
    std::normal_distribution<double> normal;
    const std::size_t end = std::min(draws, (ci + 1) * kChunk);
    for (std::size_t i = ci * kChunk; i < end; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
        const double z = normal(rng) + (shifted ? (*shift)[k] : 0.0);
        s += spec.eigenvalues[k] * z * z;
      }
      out[i] = s;
    }
  });
  return out;
}

}  // namespace pbf
