#include <algorithm>
#include <chrono>
#include <cmath>

#include "sid/numeric.hpp"
#include "sid/parallel.hpp"
#include "sid/simulation.hpp"

namespace sid {

namespace {

constexpr std::uint64_t kDataStream = 0x6461746100000001ULL;
constexpr std::uint64_t kBootstrapStream = 0x626f6f7400000002ULL;
constexpr std::uint64_t kCalibrationStream = 0x63616c6900000003ULL;

struct ReplicateOutcome {
  std::vector<std::vector<char>> reject;  // [method][alpha]
  double censored_fraction = 0.0;
};

void validate_mc_config(const MonteCarloConfig &cfg, const std::vector<std::string> &methods) {
  if (cfg.reps < 1) throw Error(ErrorCode::InvalidConfig, "reps must be >= 1");
  if (cfg.bootstrap_reps < 1) throw Error(ErrorCode::InvalidConfig, "bootstrap replicates must be >= 1");
  if (cfg.alphas.empty()) throw Error(ErrorCode::InvalidConfig, "at least one alpha is required");
  for (double a : cfg.alphas)
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  if (methods.empty()) throw Error(ErrorCode::InvalidConfig, "at least one method is required");
}

std::size_t grid_integer(const std::string &key, double v) {
  if (!(v >= 1.0) || v != std::floor(v))
    throw Error(ErrorCode::InvalidConfig, "grid values for " + key + " must be positive integers");
  return static_cast<std::size_t>(v);
}

}  // namespace

double MonteCarloReport::rate(const std::string &method, double alpha) const {
  for (const auto &r : results) {
    if (r.method != method) continue;
    for (std::size_t a = 0; a < alphas.size(); ++a)
      if (alphas[a] == alpha) return r.rates[a];
  }
  throw Error(ErrorCode::InvalidConfig, "no rate recorded for " + method);
}

MonteCarloReport monte_carlo(const ScenarioSpec &spec, const std::vector<std::string> &methods,
                             const MonteCarloConfig &cfg) {
  validate_mc_config(cfg, methods);
  validate_scenario(spec);
  std::vector<TestDivergence> divs;
  for (const auto &m : methods) divs.push_back(parse_method(m));

  const auto start = std::chrono::steady_clock::now();
  const ScenarioInfo &info = scenario_info(spec.id);

  std::optional<double> lambda;
  if (info.mode != CensoringMode::Fixed) {
    if (!spec.target_censoring)
      throw Error(ErrorCode::UncalibratedCensoring, "scenario " + spec.id + " needs a target censoring rate");
    lambda = calibrate_censoring(spec, *spec.target_censoring, derive_key(cfg.seed, kCalibrationStream));
  }

  TestConfig tc;
  tc.w_kernel = cfg.w_kernel;
  tc.bootstrap_reps = cfg.bootstrap_reps;
  tc.alpha = cfg.alphas.front();
  tc.variant = cfg.variant;
  tc.threads = 1;

  const std::uint64_t data_key = derive_key(cfg.seed, kDataStream);
  const std::uint64_t boot_key = derive_key(cfg.seed, kBootstrapStream);
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(cfg.reps));
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t rep) {
    CounterRng rng(data_key, rep);
    const CensoredDataset ds = generate(spec, lambda, rng);
    ReplicateOutcome &out = outcomes[rep];
    out.censored_fraction = 1.0 - static_cast<double>(ds.event_count()) / static_cast<double>(ds.size());
    TestConfig local = tc;
    // Shared across methods so that methods see the same multipliers.
    local.seed = derive_key(boot_key, rep);
    out.reject.resize(divs.size());
    for (std::size_t m = 0; m < divs.size(); ++m) {
      const TestResult r = run_test(ds, local, divs[m]);
      for (double a : cfg.alphas)
        out.reject[m].push_back(rejects(r.scaled_statistic, r.bootstrap_draws, a) ? 1 : 0);
    }
  });

  MonteCarloReport report;
  report.scenario = spec;
  report.lambda = lambda;
  report.methods = methods;
  report.reps = cfg.reps;
  report.bootstrap_reps = cfg.bootstrap_reps;
  report.alphas = cfg.alphas;
  report.seed = cfg.seed;
  for (std::size_t m = 0; m < divs.size(); ++m) {
    MethodRates mr;
    mr.method = methods[m];
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
      int count = 0;
      std::vector<std::uint8_t> flags;
      for (const auto &o : outcomes) {
        count += o.reject[m][a];
        flags.push_back(static_cast<std::uint8_t>(o.reject[m][a]));
      }
      mr.rejections.push_back(count);
      mr.decisions.push_back(std::move(flags));
      mr.rates.push_back(static_cast<double>(count) / static_cast<double>(cfg.reps));
    }
    report.results.push_back(std::move(mr));
  }
  CompensatedSum censored;
  for (const auto &o : outcomes) censored.add(o.censored_fraction);
  report.observed_censoring = censored.value() / static_cast<double>(cfg.reps);
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<MonteCarloReport> power_sweep(const ScenarioSpec &family, const std::string &grid_key,
                                          const std::vector<double> &grid,
                                          const std::vector<std::string> &methods,
                                          const MonteCarloConfig &cfg) {
  if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "empty sweep grid");
  if (grid_key != "n" && grid_key != "theta" && grid_key != "p" && grid_key != "beta")
    throw Error(ErrorCode::InvalidConfig, "grid key must be n, theta, p or beta");

  std::vector<MonteCarloReport> out;
  for (double v : grid) {
    ScenarioSpec spec = family;
    std::vector<std::string> point_methods = methods;
    if (grid_key == "n")
      spec.n = grid_integer(grid_key, v);
    else if (grid_key == "p")
      spec.p = grid_integer(grid_key, v);
    else if (grid_key == "theta")
      spec.theta = v;
    else {
      if (!(v > 0.0 && v < 2.0)) throw Error(ErrorCode::InvalidKernel, "beta must lie in (0, 2)");
      for (auto &m : point_methods)
        if (m == "sid-beta") m = method_name(BetaSid{v});
    }
    MonteCarloReport r = monte_carlo(spec, point_methods, cfg);
    r.grid_key = grid_key;
    r.grid_value = v;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sid
