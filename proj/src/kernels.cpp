#include "sid/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sid/core.hpp"

namespace sid {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 2.0))
    throw Error(ErrorCode::InvalidKernel, "beta must lie in (0, 2)");
}

double nth_power(double norm, double beta) { return norm == 0.0 ? 0.0 : std::pow(norm, beta); }

}  // namespace

void validate_kernel(const CovariateKernel &k) {
  std::visit(overloaded{
                 [](const GaussianKernel &g) {
                   if (!(g.gamma > 0.0) || !std::isfinite(g.gamma))
                     throw Error(ErrorCode::InvalidKernel, "Gaussian scale must be positive");
                 },
                 [](const LaplacianKernel &l) {
                   if (!(l.gamma > 0.0) || !std::isfinite(l.gamma))
                     throw Error(ErrorCode::InvalidKernel, "Laplacian scale must be positive");
                 },
                 [](const DistanceInducedKernel &d) { check_beta(d.beta); },
             },
             k);
}

std::string describe(const CovariateKernel &k) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const GaussianKernel &g) { os << "gaussian(gamma=" << g.gamma << ")"; },
                 [&](const LaplacianKernel &l) { os << "laplacian(gamma=" << l.gamma << ")"; },
                 [&](const DistanceInducedKernel &d) { os << "distance(beta=" << d.beta << ")"; },
             },
             k);
  return os.str();
}

double kernel_value(const CovariateKernel &k, const Eigen::Ref<const Eigen::VectorXd> &x1,
                    const Eigen::Ref<const Eigen::VectorXd> &x2) {
  if (x1.size() != x2.size()) throw Error(ErrorCode::DimensionMismatch, "covariate dimensions differ");
  return std::visit(overloaded{
                        [&](const GaussianKernel &g) {
                          return std::exp(-(x1 - x2).squaredNorm() / (g.gamma * g.gamma));
                        },
                        [&](const LaplacianKernel &l) { return std::exp(-(x1 - x2).norm() / l.gamma); },
                        [&](const DistanceInducedKernel &d) {
                          return 0.5 * (nth_power(x1.norm(), d.beta) + nth_power(x2.norm(), d.beta) -
                                        nth_power((x1 - x2).norm(), d.beta));
                        },
                    },
                    k);
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd &x, const CovariateKernel &k) {
  validate_kernel(k);
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXd xj = x.row(j).transpose();
    g(j, j) = kernel_value(k, xj, xj);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = kernel_value(k, x.row(i).transpose(), xj);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd &x1, const Eigen::MatrixXd &x2,
                            const CovariateKernel &k) {
  validate_kernel(k);
  if (x1.cols() != x2.cols()) throw Error(ErrorCode::DimensionMismatch, "covariate dimensions differ");
  Eigen::MatrixXd g(x1.rows(), x2.rows());
  for (Eigen::Index i = 0; i < x1.rows(); ++i)
    for (Eigen::Index j = 0; j < x2.rows(); ++j)
      g(i, j) = kernel_value(k, x1.row(i).transpose(), x2.row(j).transpose());
  return g;
}

Eigen::MatrixXd semimetric_matrix(const Eigen::MatrixXd &x, const NormPowerSemimetric &rho) {
  check_beta(rho.beta);
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = nth_power((x.row(i) - x.row(j)).norm(), rho.beta);
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

bool kernel_semimetric_consistency(const Eigen::MatrixXd &kmat, const Eigen::MatrixXd &rho,
                                   double rel_tol) {
  if (kmat.rows() != kmat.cols() || rho.rows() != kmat.rows() || rho.cols() != kmat.cols())
    return false;
  const Eigen::Index n = kmat.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double induced = kmat(i, i) + kmat(j, j) - 2.0 * kmat(i, j);
      const double scale = std::max({std::abs(kmat(i, i)), std::abs(kmat(j, j)),
                                     std::abs(kmat(i, j)), std::abs(rho(i, j)), 1.0});
      if (std::abs(induced - rho(i, j)) > rel_tol * scale) return false;
    }
  }
  return true;
}

bool kernel_semimetric_consistency(const DistanceInducedKernel &k, const NormPowerSemimetric &rho,
                                   const Eigen::MatrixXd &x, double rel_tol) {
  if (k.beta != rho.beta) return false;
  return kernel_semimetric_consistency(gram_matrix(x, k), semimetric_matrix(x, rho), rel_tol);
}

double median_heuristic(const Eigen::MatrixXd &x) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw Error(ErrorCode::DegenerateCovariates, "median heuristic needs at least two points");
  std::vector<double> sq;
  sq.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) sq.push_back((x.row(i) - x.row(j)).squaredNorm());

  const std::size_t m = sq.size();
  const std::size_t mid = m / 2;
  std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid), sq.end());
  double median = sq[mid];
  if (m % 2 == 0) {
    const double lower = *std::max_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (lower + median);
  }
  if (!(median > 0.0)) {
    const double largest = *std::max_element(sq.begin(), sq.end());
    if (!(largest > 0.0))
      throw Error(ErrorCode::DegenerateCovariates, "all pairwise covariate distances are zero");
    throw Error(ErrorCode::DegenerateCovariates,
                "median pairwise covariate distance is zero (too many tied covariates)");
  }
  return std::sqrt(median / 2.0);
}

}  // namespace sid
