#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sid/bootstrap.hpp"
#include "sid/core.hpp"
#include "sid/rng.hpp"

namespace sid {

// Data-generating processes for the simulation studies. Every exponential
// law Exp(m) is parameterized by its MEAN m.

/// How the free censoring parameter lambda enters a scenario.
enum class CensoringMode {
  EventMean,      // T ~ Exp(lambda); C's law is fixed
  CensorMean,     // C ~ Exp(lambda)
  CensorLogMean,  // C ~ Exp(exp(lambda + X_1))
  Fixed,          // no free parameter
};

struct ScenarioInfo {
  std::string id;
  std::string description;
  CensoringMode mode;
  std::size_t default_p;
  bool null_hypothesis;  // T independent of X by construction
  bool uses_theta;
  bool configurable_p;
};

const std::vector<ScenarioInfo> &scenario_catalog();
const ScenarioInfo &scenario_info(const std::string &id);

struct ScenarioSpec {
  std::string id;
  std::size_t n = 50;
  /// Target censoring fraction in (0, 1); nullopt for scenarios whose
  /// censoring law is fully specified.
  std::optional<double> target_censoring;
  /// Covariate dimension; 0 selects the scenario default.
  std::size_t p = 0;
  /// Effect size for the theta-indexed scenarios.
  double theta = 0.0;
};

/// Throws UnknownScenario or InvalidConfig.
void validate_scenario(const ScenarioSpec &spec);
std::size_t effective_dim(const ScenarioSpec &spec);

/// Latent draws before censoring is applied. Cured subjects carry
/// t = +infinity; they never leave this struct.
struct LatentSample {
  Eigen::MatrixXd x;
  std::vector<double> t;
  std::vector<double> c;
};

LatentSample generate_latent(const ScenarioSpec &spec, std::optional<double> lambda, std::size_t n,
                             CounterRng &rng);

/// n i.i.d. observations (Y = min(T, C), delta = I(T <= C), X). Throws
/// UncalibratedCensoring when the scenario has a free lambda and none is
/// given.
CensoredDataset generate(const ScenarioSpec &spec, std::optional<double> lambda, CounterRng &rng);

struct CalibrationOptions {
  std::size_t draws = 200000;
  double tolerance = 0.005;
  int max_iterations = 40;
};

/// Bisection for lambda so that P{T > C} ~= target, using one fixed set of
/// common random numbers. Throws NotApplicable for Fixed scenarios and
/// BracketFailure when the target cannot be reached.
double calibrate_censoring(const ScenarioSpec &spec, double target, std::uint64_t seed,
                           const CalibrationOptions &opts = {});

/// Monte Carlo estimate of P{T > C} at the given lambda.
double censoring_fraction(const ScenarioSpec &spec, std::optional<double> lambda, std::size_t draws,
                          std::uint64_t seed);

// --- Monte Carlo harness ----------------------------------------------------------

struct MonteCarloConfig {
  int reps = 300;
  int bootstrap_reps = 500;
  std::vector<double> alphas{0.01, 0.05, 0.1};
  std::uint64_t seed = 1;
  BootstrapVariant variant = BootstrapVariant::VWild;
  SmoothingKernel w_kernel = SmoothingKernel::GaussianDensity;
  unsigned threads = 1;
};

struct MethodRates {
  std::string method;
  std::vector<int> rejections;  // per alpha
  std::vector<double> rates;    // rejections / reps
  /// decisions[a][r] is 1 when replicate r rejected at alphas[a]. Kept for
  /// paired comparisons between methods run on the same replicates.
  std::vector<std::vector<std::uint8_t>> decisions;
};

struct MonteCarloReport {
  ScenarioSpec scenario;
  std::optional<double> lambda;
  std::vector<std::string> methods;
  int reps = 0;
  int bootstrap_reps = 0;
  std::vector<double> alphas;
  std::vector<MethodRates> results;
  double observed_censoring = 0.0;  // mean censored fraction over replicates
  double wall_time_sec = 0.0;
  std::uint64_t seed = 0;
  /// Set by power_sweep: the swept parameter and its value at this point.
  std::optional<std::string> grid_key;
  std::optional<double> grid_value;

  double rate(const std::string &method, double alpha) const;
};

MonteCarloReport monte_carlo(const ScenarioSpec &spec, const std::vector<std::string> &methods,
                             const MonteCarloConfig &cfg);

/// One report per grid value. grid_key is one of "n", "theta", "p", "beta".
/// For "beta", the placeholder method "sid-beta" runs SID_beta at the grid
/// value; other listed methods run unchanged as benchmarks.
std::vector<MonteCarloReport> power_sweep(const ScenarioSpec &family, const std::string &grid_key,
                                          const std::vector<double> &grid,
                                          const std::vector<std::string> &methods,
                                          const MonteCarloConfig &cfg);

}  // namespace sid
