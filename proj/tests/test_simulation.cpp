#include <doctest.h>

#include <cmath>

#include "sid/simulation.hpp"

using namespace sid;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double> &v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

/// |sample mean - mu| within 4 standard errors.
bool mean_ok(const std::vector<double> &v, double mu, double var) {
  return std::abs(moments(v).mean - mu) <= 4.0 * std::sqrt(var / static_cast<double>(v.size()));
}

std::vector<double> column(const Eigen::MatrixXd &x, Eigen::Index c) {
  return std::vector<double>(x.col(c).data(), x.col(c).data() + x.rows());
}

std::vector<double> logs(const std::vector<double> &v) {
  std::vector<double> out;
  for (double x : v) out.push_back(std::log(x));
  return out;
}

constexpr std::size_t kDraws = 100000;

}  // namespace

TEST_CASE("catalog") {
  CHECK(scenario_catalog().size() >= 30);
  CHECK(scenario_info("ex2-logcircle").default_p == 2);
  CHECK(scenario_info("ex3-case4").default_p == 6);
  CHECK(scenario_info("ex6-case1").mode == CensoringMode::Fixed);
  CHECK_THROWS_AS(scenario_info("ex9-case1"), Error);
  CHECK_THROWS_AS(validate_scenario({"ex3-case1", 50, 0.3, 4}), Error);
  CHECK_NOTHROW(validate_scenario({"appC-highdim", 50, std::nullopt, 40}));
  CHECK(effective_dim({"appC-highdim", 50, std::nullopt, 40}) == 40);
}

TEST_CASE("exponential laws are parameterized by their mean") {
  CounterRng rng(1, 0);
  // ex1-case1 with lambda = 2: T ~ Exp(mean 2), C ~ Exp(mean 1), X ~ U[-1, 1]
  const LatentSample s = generate_latent({"ex1-case1"}, 2.0, kDraws, rng);
  CHECK(mean_ok(s.t, 2.0, 4.0));
  CHECK(mean_ok(s.c, 1.0, 1.0));
  const auto x = column(s.x, 0);
  CHECK(mean_ok(x, 0.0, 1.0 / 3.0));
  CHECK(std::abs(moments(x).var - 1.0 / 3.0) < 0.01);

  // ex3-case1: E[T | X] = exp(1'X / 10), so E[T] = exp(Var(1'X) / 200)
  CounterRng rng3(2, 0);
  const LatentSample s3 = generate_latent({"ex3-case1"}, 1.5, kDraws, rng3);
  double var_sum = 0.0;
  for (int j = 0; j < 6; ++j)
    for (int k = 0; k < 6; ++k) var_sum += std::pow(0.5, std::abs(j - k));
  CHECK(mean_ok(s3.c, 1.5, 2.25));
  const double et = std::exp(var_sum / 200.0);
  CHECK(std::abs(moments(s3.t).mean - et) < 4.0 * std::sqrt(moments(s3.t).var / kDraws));
  // covariance structure
  const Eigen::MatrixXd centered = s3.x.rowwise() - s3.x.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(kDraws - 1);
  CHECK(std::abs(cov(0, 1) - 0.5) < 0.02);
  CHECK(std::abs(cov(0, 2) - 0.25) < 0.02);
  CHECK(std::abs(cov(3, 3) - 1.0) < 0.03);
}

TEST_CASE("log-linear event times") {
  // ex6-case1: log T = theta X + eps, Var = theta^2 + 1
  CounterRng rng(3, 0);
  const LatentSample s = generate_latent({"ex6-case1", 50, std::nullopt, 0, 0.6}, std::nullopt, kDraws, rng);
  const auto lt = logs(s.t);
  CHECK(mean_ok(lt, 0.0, 1.36));
  CHECK(std::abs(moments(lt).var - 1.36) < 0.03);
  CHECK(mean_ok(s.c, 3.0, 9.0));

  // ex2-logquadratic: E[log T] = 1.2 E[X^2] = 0.4
  CounterRng rng2(4, 0);
  const LatentSample q = generate_latent({"ex2-logquadratic"}, 1.0, kDraws, rng2);
  CHECK(std::abs(moments(logs(q.t)).mean - 0.4) < 0.02);

  // ex3-case3: log T = 0.2 b'X + 2 eps with Var(b'X) = 3
  double vb = 0.0;
  const double b[6] = {1, 1, 1, -1, -1, -1};
  for (int j = 0; j < 6; ++j)
    for (int k = 0; k < 6; ++k) vb += b[j] * b[k] * std::pow(0.5, std::abs(j - k));
  CounterRng rng3(5, 0);
  const LatentSample s3 = generate_latent({"ex3-case3"}, 1.0, kDraws, rng3);
  const auto l3 = logs(s3.t);
  CHECK(mean_ok(l3, 0.0, 0.04 * vb + 4.0));
  CHECK(std::abs(moments(l3).var / (0.04 * vb + 4.0) - 1.0) < 0.03);
}

TEST_CASE("covariate laws") {
  CounterRng rng(6, 0);
  const auto p = column(generate_latent({"appC-poisson"}, 1.0, kDraws, rng).x, 0);
  CHECK(mean_ok(p, 3.0, 3.0));
  CHECK(std::abs(moments(p).var - 3.0) < 0.1);
  CounterRng rng2(7, 0);
  const auto t = column(generate_latent({"appC-t3"}, 1.0, kDraws, rng2).x, 0);
  CHECK(mean_ok(t, 0.0, 3.0));
  CounterRng rng3(8, 0);
  const auto c = generate_latent({"ex2-logcircle"}, 1.0, 1000, rng3);
  CHECK(c.x.cols() == 2);
  CHECK(c.x.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("weibull censoring uses shape 3.35 + 1.75X and unit scale") {
  CounterRng rng(9, 0);
  const LatentSample s = generate_latent({"ex1-case3"}, 1.0, kDraws, rng);
  // E[C | X] = Gamma(1 + 1 / shape); check on the slice X > 0.9
  std::vector<double> slice;
  for (std::size_t i = 0; i < kDraws; ++i)
    if (s.x(static_cast<Eigen::Index>(i), 0) > 0.9) slice.push_back(s.c[i]);
  const double expected = std::tgamma(1.0 + 1.0 / (3.35 + 1.75 * 0.95));
  CHECK(std::abs(moments(slice).mean - expected) < 0.01);
}

TEST_CASE("cure mixture") {
  CounterRng rng(10, 0);
  const ScenarioSpec spec{"ex4-cure1", 20000};
  const LatentSample s = generate_latent(spec, 1.0, spec.n, rng);
  std::size_t cured = 0;
  for (double t : s.t) cured += std::isinf(t) ? 1 : 0;
  const double frac = static_cast<double>(cured) / static_cast<double>(spec.n);
  CHECK(std::abs(frac - 0.4) < 4.0 * std::sqrt(0.24 / spec.n));

  CounterRng a(10, 0);
  const CensoredDataset ds = generate(spec, 1.0, a);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(std::isfinite(ds.times()[i]));
    if (std::isinf(s.t[i])) CHECK(ds.status()[i] == 0);
  }
}

TEST_CASE("generate requires calibration") {
  CounterRng rng(11, 0);
  CHECK_THROWS_AS(generate({"ex1-case1"}, std::nullopt, rng), Error);
  CHECK_NOTHROW(generate({"ex6-case2", 30}, std::nullopt, rng));
  CHECK_THROWS_AS(generate({"nope"}, 1.0, rng), Error);
}

TEST_CASE("censoring calibration") {
  const ScenarioSpec s1{"ex1-case1"};
  const double lambda = calibrate_censoring(s1, 0.3, 123);
  CHECK(std::abs(censoring_fraction(s1, lambda, kDraws, 77) - 0.3) < 0.01);
  // closed form for ex1-case1: P(T > C) = lambda / (1 + lambda)
  CHECK(std::abs(lambda / (1.0 + lambda) - 0.3) < 0.01);

  CounterRng rng(12, 0);
  const CensoredDataset big = generate({"ex1-case1", 100000}, lambda, rng);
  CHECK(std::abs(1.0 - static_cast<double>(big.event_count()) / 1e5 - 0.3) < 0.01);

  const ScenarioSpec s5{"ex5-case2"};
  const double l5 = calibrate_censoring(s5, 0.4, 5);
  CHECK(std::abs(censoring_fraction(s5, l5, kDraws, 8) - 0.4) < 0.01);

  CHECK(calibrate_censoring(s1, 0.3, 123) == lambda);
  auto code = [](auto &&fn) {
    try {
      fn();
    } catch (const Error &e) {
      return e.code();
    }
    return ErrorCode::InvalidConfig;
  };
  CHECK(code([&] { calibrate_censoring(s1, 0.0, 1); }) == ErrorCode::BracketFailure);
  CHECK(code([&] { calibrate_censoring({"ex6-case1"}, 0.3, 1); }) == ErrorCode::NotApplicable);
}

TEST_CASE("monte carlo harness") {
  const ScenarioSpec spec{"ex1-case1", 30, 0.3};
  MonteCarloConfig cfg;
  cfg.reps = 12;
  cfg.bootstrap_reps = 99;
  cfg.seed = 5;
  const std::vector<std::string> methods{"sid-gauss", "sid-0.5"};
  const MonteCarloReport a = monte_carlo(spec, methods, cfg);
  CHECK(a.results.size() == 2);
  for (const auto &m : a.results)
    for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
      CHECK(m.rates[i] == static_cast<double>(m.rejections[i]) / 12.0);
      CHECK(m.decisions[i].size() == 12);
    }
  cfg.threads = 3;
  const MonteCarloReport b = monte_carlo(spec, methods, cfg);
  for (std::size_t m = 0; m < 2; ++m) CHECK(a.results[m].decisions == b.results[m].decisions);
  CHECK(a.lambda == b.lambda);
  CHECK(a.observed_censoring == b.observed_censoring);

  cfg.reps = 0;
  CHECK_THROWS_AS(monte_carlo(spec, methods, cfg), Error);
  cfg.reps = 5;
  CHECK_THROWS_AS(monte_carlo(spec, {"sid-x"}, cfg), Error);
  CHECK_THROWS_AS(monte_carlo({"ex1-case1", 30}, methods, cfg), Error);
}

TEST_CASE("power sweep") {
  MonteCarloConfig cfg;
  cfg.reps = 4;
  cfg.bootstrap_reps = 50;
  cfg.alphas = {0.05};
  const auto theta = power_sweep({"ex6-case1", 30}, "theta", {0.0, 0.5}, {"sid-gauss"}, cfg);
  REQUIRE(theta.size() == 2);
  CHECK(theta[1].scenario.theta == 0.5);
  CHECK(*theta[1].grid_key == "theta");

  const auto beta = power_sweep({"appC-beta-linear", 30, 0.3}, "beta", {0.25, 1.75}, {"sid-beta", "sid-gauss"}, cfg);
  CHECK(beta[0].results[0].method == "sid-0.25");
  CHECK(beta[1].results[0].method == "sid-1.75");
  CHECK(beta[1].results[1].method == "sid-gauss");

  const auto n = power_sweep({"ex1-case1", 30, 0.3}, "n", {20, 40}, {"sid-lap"}, cfg);
  CHECK(n[1].scenario.n == 40);
  CHECK_THROWS_AS(power_sweep({"ex1-case1", 30, 0.3}, "n", {20.5}, {"sid-lap"}, cfg), Error);
  CHECK_THROWS_AS(power_sweep({"ex1-case1", 30, 0.3}, "gamma", {1.0}, {"sid-lap"}, cfg), Error);
}
