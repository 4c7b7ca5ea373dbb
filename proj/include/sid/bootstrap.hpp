#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sid/core.hpp"
#include "sid/estimators.hpp"
#include "sid/kernels.hpp"
#include "sid/smoothing.hpp"

namespace sid {

/// M_ij = (1/n) sum_{events r} U-hat(X_i, X_j; Y_r) V-hat(Y_i, d_i; Y_j, d_j; Y_r),
/// the quadratic-form core of the wild bootstrap. Exactly symmetric.
struct BootstrapMatrix {
  Eigen::MatrixXd m;

  std::size_t size() const noexcept { return static_cast<std::size_t>(m.rows()); }
};

BootstrapMatrix build_bootstrap_matrix(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp);
BootstrapMatrix build_bootstrap_matrix(const CensoredDataset &ds, const CovariateKernel &k,
                                       const SmoothingSpec &spec);

enum class BootstrapVariant { UWild, VWild };

std::string to_string(BootstrapVariant v);
BootstrapVariant parse_bootstrap_variant(const std::string &name);

/// Rademacher multipliers keyed by (seed, replicate). The vector for a given
/// replicate never depends on which other replicates were drawn.
class MultiplierStream {
 public:
  explicit MultiplierStream(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::vector<double> draw(std::uint64_t replicate, std::size_t n) const;

 private:
  std::uint64_t seed_;
};

/// UWild: (2 / (n (n-1))) sum_{i<j} e_i e_j M_ij.
/// VWild: (1 / n^2) sum_{i,j} e_i e_j M_ij (diagonal included).
/// Throws BadMultiplier unless every e_i is +1 or -1.
double wild_statistic(const BootstrapMatrix &m, std::span<const double> e, BootstrapVariant variant);

// --- Test configuration and result -------------------------------------------

/// Gaussian-kernel SID. gamma == nullopt selects the median heuristic.
struct GaussianSid {
  std::optional<double> gamma;
};
/// Laplacian-kernel SID. gamma == nullopt selects the median heuristic.
struct LaplacianSid {
  std::optional<double> gamma;
};
/// SID_beta, computed as 2 x SID with kernel K_beta.
struct BetaSid {
  double beta;
};
using TestDivergence = std::variant<GaussianSid, LaplacianSid, BetaSid>;

/// "sid-gauss", "sid-lap", or "sid-<beta>" such as "sid-1" or "sid-0.5".
TestDivergence parse_method(const std::string &name);
std::string method_name(const TestDivergence &d);

struct TestConfig {
  /// Fixed smoothing; nullopt means W = w_kernel with the default bandwidth rule.
  std::optional<SmoothingSpec> smoothing;
  SmoothingKernel w_kernel = SmoothingKernel::GaussianDensity;
  double bandwidth_constant = default_bandwidth_constant();
  int bootstrap_reps = 2000;
  double alpha = 0.05;
  std::uint64_t seed = 20240229;
  BootstrapVariant variant = BootstrapVariant::VWild;
  unsigned threads = 1;
};

void validate_config(const TestConfig &cfg);

struct TestResult {
  double statistic = 0.0;
  double scaled_statistic = 0.0;
  std::vector<double> bootstrap_draws;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double h_used = 0.0;
  std::optional<double> gamma_used;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  BootstrapVariant variant = BootstrapVariant::VWild;
};

/// Order statistic of rank ceil((1 - alpha) B) among the ascending draws.
double critical_value(std::span<const double> draws, double alpha);

/// (1 + #{b : draw_b >= observed}) / (B + 1).
double monte_carlo_p_value(double observed, std::span<const double> draws);

/// observed >= critical value, except that a statistic sitting at the bottom
/// of a degenerate bootstrap distribution (observed <= every draw) never
/// rejects.
bool rejects(double observed, std::span<const double> draws, double alpha);

/// Fills critical value, p-value and decision from scaled statistic and draws.
TestResult finalize_result(double statistic, double scaled_statistic, std::vector<double> draws,
                           double alpha);

/// Full wild-bootstrap test: resolve h and gamma, compute the observed
/// statistic (V-statistic for VWild, U-statistic for UWild), build M once,
/// draw B multiplier vectors and decide at level alpha. All reported
/// statistics are scaled by n h^(1/2).
TestResult run_test(const CensoredDataset &ds, const TestConfig &cfg, const TestDivergence &div);

/// Moments of B unscaled UWild draws next to the exact multiplier moments:
/// mean 0 and variance (4 / (n (n-1))^2) sum_{i<j} M_ij^2.
struct NullDiagnostics {
  double mean = 0.0;
  double variance = 0.0;
  double exact_mean = 0.0;
  double exact_variance = 0.0;
};

NullDiagnostics bootstrap_null_diagnostics(const BootstrapMatrix &m, int reps, std::uint64_t seed);

}  // namespace sid
