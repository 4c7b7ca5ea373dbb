#pragma once

#include <string>
#include <variant>

#include <Eigen/Dense>

namespace sid {

// Covariate kernels. Rows of X are observations.

/// exp(-||x - x'||^2 / gamma^2)
struct GaussianKernel {
  double gamma;
};

/// exp(-||x - x'|| / gamma)
struct LaplacianKernel {
  double gamma;
};

/// K_beta(x, x') = (||x||^beta + ||x'||^beta - ||x - x'||^beta) / 2, 0 < beta < 2.
/// Generates the semimetric ||x - x'||^beta.
struct DistanceInducedKernel {
  double beta;
};

using CovariateKernel = std::variant<GaussianKernel, LaplacianKernel, DistanceInducedKernel>;

/// rho_beta(x, x') = ||x - x'||^beta, 0 < beta < 2.
struct NormPowerSemimetric {
  double beta;
};

/// Throws InvalidKernel for non-positive scales or beta outside (0, 2).
void validate_kernel(const CovariateKernel &k);
std::string describe(const CovariateKernel &k);

double kernel_value(const CovariateKernel &k, const Eigen::Ref<const Eigen::VectorXd> &x1,
                    const Eigen::Ref<const Eigen::VectorXd> &x2);

/// Symmetric n x n Gram matrix, each unordered pair evaluated once and mirrored.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd &x, const CovariateKernel &k);

/// Cross-Gram between two samples with the same dimension.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd &x1, const Eigen::MatrixXd &x2,
                            const CovariateKernel &k);

/// Symmetric, zero diagonal, nonnegative.
Eigen::MatrixXd semimetric_matrix(const Eigen::MatrixXd &x, const NormPowerSemimetric &rho);

/// True iff rho_ij == K_ii + K_jj - 2 K_ij for all pairs, relative tolerance
/// rel_tol against the magnitude of the operands.
bool kernel_semimetric_consistency(const Eigen::MatrixXd &kmat, const Eigen::MatrixXd &rho,
                                   double rel_tol = 1e-12);
bool kernel_semimetric_consistency(const DistanceInducedKernel &k, const NormPowerSemimetric &rho,
                                   const Eigen::MatrixXd &x, double rel_tol = 1e-12);

/// gamma_med = sqrt(median{||X_i - X_j||^2 : i < j} / 2). For an even number of
/// pairs the median is the mean of the two middle order statistics.
double median_heuristic(const Eigen::MatrixXd &x);

}  // namespace sid
