#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sid/core.hpp"
#include "sid/kernels.hpp"
#include "sid/smoothing.hpp"

namespace sid {

/// Smoothed counting-process quantities evaluated at every event time.
///
/// Column e corresponds to the e-th uncensored observation r = event_index[e]
/// (ascending row order). With t = Y_r:
///   w(i, e) = delta_i * W_h(Y_i - t)
///   a(k, e) = I(Y_k >= t)
///   s_hat(e) = (1/n) sum_k a(k, e)
///   f_hat(e) = (1/n) sum_i w(i, e)
/// so that b_{ikr} = w(i, e) * a(k, e).
struct SmoothedProcesses {
  std::size_t n = 0;
  std::vector<std::size_t> event_index;
  Eigen::MatrixXd w;
  Eigen::MatrixXd a;
  Eigen::VectorXd s_hat;
  Eigen::VectorXd f_hat;

  std::size_t event_count() const noexcept { return event_index.size(); }
};

SmoothedProcesses build_smoothed_processes(const CensoredDataset &ds, const SmoothingSpec &spec);

enum class EstimatorKind { VEventSum, VQuintuple, UStatistic, UBruteForce };

struct KernelDivergence {
  CovariateKernel kernel;
};
struct BetaDivergence {
  double beta;
};
using Divergence = std::variant<KernelDivergence, BetaDivergence>;

struct SidEstimate {
  double value = 0.0;
  EstimatorKind estimator_kind = EstimatorKind::VEventSum;
  Divergence divergence;
  double h = 0.0;
};

const char *to_string(EstimatorKind kind);

// --- SID_K estimators ------------------------------------------------------

/// Plug-in V-statistic, (1/n) sum_k [S1(Y_k) - 2 S2(Y_k) + S3(Y_k)] delta_k.
/// O(n^2) per event time.
SidEstimate sid_v_event_sum(const CensoredDataset &ds, const CovariateKernel &k,
                            const SmoothingSpec &spec);

/// The same V-statistic as a literal five-fold sum over (i, j, k, l, r).
/// Reference path only: throws InstanceTooLarge for n > 40.
SidEstimate sid_v_quintuple(const CensoredDataset &ds, const CovariateKernel &k,
                            const SmoothingSpec &spec);

/// U-statistic over pairwise-distinct (i, j, k, l, r), normalized by (n)_5.
/// O(n^2) per event time via inclusion-exclusion over index coincidences.
SidEstimate sid_u_statistic(const CensoredDataset &ds, const CovariateKernel &k,
                            const SmoothingSpec &spec);

/// Literal distinct-quintuple loop. Throws InstanceTooLarge for n > 12.
/// If terms_visited is given it receives the number of ordered quintuples
/// enumerated (before the delta_r filter).
SidEstimate sid_u_bruteforce(const CensoredDataset &ds, const CovariateKernel &k,
                             const SmoothingSpec &spec, std::size_t *terms_visited = nullptr);

inline constexpr std::size_t kQuintupleMaxN = 40;
inline constexpr std::size_t kBruteForceMaxN = 12;

// --- SID_beta estimators ---------------------------------------------------
//
// SID_beta = SID_rho with rho = ||x - x'||^beta = 2 SID_{K_beta}. Both
// estimators below are computed as twice the K_beta estimators.

SidEstimate sid_beta_v(const CensoredDataset &ds, double beta, const SmoothingSpec &spec);
SidEstimate sid_beta_u(const CensoredDataset &ds, double beta, const SmoothingSpec &spec);

/// Direct semimetric form, (1/n) sum_k [-S1 + 2 S2 - S3] delta_k with rho in
/// place of K. Kept as an independent check of the K_beta route.
double sid_rho_v_event_sum(const CensoredDataset &ds, const NormPowerSemimetric &rho,
                           const SmoothingSpec &spec);

/// Direct semimetric U form, -(1/(n)_5) sum_distinct rho_ij [..][..] delta_r.
/// Brute force, n <= 12.
double sid_rho_u_bruteforce(const CensoredDataset &ds, const NormPowerSemimetric &rho,
                            const SmoothingSpec &spec);

// --- Matrix-level entry points ----------------------------------------------

/// V-statistic from a precomputed Gram matrix.
double v_event_sum(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp);

/// U-statistic from a precomputed Gram matrix.
double u_statistic(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp);

/// The three smoothed conditional-mean terms S~_1, S~_2, S~_3 at one event time.
std::array<double, 3> smoothed_terms(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp,
                                     std::size_t event);

// --- Second-order projections ------------------------------------------------

/// U-hat(X_i, X_j; t): K_ij doubly centered by at-risk means at the event-th
/// event time.
double projection_u_hat(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp, std::size_t i,
                        std::size_t j, std::size_t event);

/// V-hat(Y_i, delta_i; Y_j, delta_j; t) = v_i v_j with
/// v_i = w_i S-hat(t) - a_i F-hat_h(t).
double projection_v_hat(const SmoothedProcesses &sp, std::size_t i, std::size_t j, std::size_t event);

/// Symmetrized order-4 kernel h_n at time t for four observations, computed
/// two ways: the average of P_n over all 24 orderings, and the three-term
/// closed form. Both entries should agree.
std::pair<double, double> symmetrized_kernel_check(const CensoredDataset &ds,
                                                   const std::array<std::size_t, 4> &idx, double t,
                                                   const SmoothingSpec &spec,
                                                   const Eigen::MatrixXd &kmat);

}  // namespace sid
