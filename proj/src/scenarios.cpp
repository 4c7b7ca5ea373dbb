#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>

#include "sid/simulation.hpp"

namespace sid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Vec = Eigen::VectorXd;
using CovariateFn = std::function<Vec(std::size_t p, CounterRng &)>;
// For EventMean scenarios the event function returns the unit-mean part of T.
using EventFn = std::function<double(const Vec &x, double theta, CounterRng &)>;
// For CensorMean / CensorLogMean scenarios the censoring function returns
// the unit-mean part of C.
using CensorFn = std::function<double(const Vec &x, CounterRng &)>;

struct Definition {
  ScenarioInfo info;
  CovariateFn covariates;
  EventFn event;
  CensorFn censor;
};

double unit_exponential(CounterRng &rng) { return -std::log(rng.uniform()); }

double standard_normal(CounterRng &rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  return z(rng);
}

double uniform_pm1(CounterRng &rng) { return 2.0 * rng.uniform() - 1.0; }

/// Weibull with shape a and scale b.
double weibull(double shape, double scale, CounterRng &rng) {
  return scale * std::pow(unit_exponential(rng), 1.0 / shape);
}

/// Cholesky factor of Sigma_p = (0.5^{|j-k|}).
const Eigen::MatrixXd &ar1_factor(std::size_t p) {
  static thread_local std::map<std::size_t, Eigen::MatrixXd> cache;
  auto it = cache.find(p);
  if (it == cache.end()) {
    Eigen::MatrixXd sigma(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (Eigen::Index j = 0; j < sigma.rows(); ++j)
      for (Eigen::Index k = 0; k < sigma.cols(); ++k)
        sigma(j, k) = std::pow(0.5, static_cast<double>(std::abs(j - k)));
    it = cache.emplace(p, Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL()).first;
  }
  return it->second;
}

Vec ar1_normal(std::size_t p, CounterRng &rng) {
  Vec z(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = standard_normal(rng);
  return ar1_factor(p) * z;
}

Vec scalar(double v) { return Vec::Constant(1, v); }

CovariateFn unif1() {
  return [](std::size_t, CounterRng &rng) { return scalar(uniform_pm1(rng)); };
}
CovariateFn normal1() {
  return [](std::size_t, CounterRng &rng) { return scalar(standard_normal(rng)); };
}
CovariateFn poisson3() {
  return [](std::size_t, CounterRng &rng) {
    std::poisson_distribution<int> d(3.0);
    return scalar(static_cast<double>(d(rng)));
  };
}
CovariateFn student_t3() {
  return [](std::size_t, CounterRng &rng) {
    std::student_t_distribution<double> d(3.0);
    return scalar(d(rng));
  };
}
CovariateFn ar1() { return [](std::size_t p, CounterRng &rng) { return ar1_normal(p, rng); }; }

const Vec &beta_ex3() {
  static const Vec b = (Vec(6) << 1, 1, 1, -1, -1, -1).finished();
  return b;
}
const Vec &beta1_ex3() {
  static const Vec b = (Vec(6) << 0, 0, 1, -1, 0, 0).finished();
  return b;
}
const Vec &beta2_ex3() {
  static const Vec b = (Vec(6) << 1, 1, 0, 0, 0, 0).finished();
  return b;
}
const Vec &beta_ex4() {
  static const Vec b = (Vec(6) << 1, 1, 1, -1, 1, -1).finished();
  return b;
}

EventFn unit_event() {
  return [](const Vec &, double, CounterRng &rng) { return unit_exponential(rng); };
}

/// T ~ Exp(mean(x))
EventFn exp_mean(std::function<double(const Vec &)> mean) {
  return [mean](const Vec &x, double, CounterRng &rng) { return mean(x) * unit_exponential(rng); };
}

/// log T = location(x) + scale(x) * eps, eps ~ N(0, 1)
EventFn log_linear(std::function<double(const Vec &)> location,
                   std::function<double(const Vec &)> scale) {
  return [location, scale](const Vec &x, double, CounterRng &rng) {
    const double eps = standard_normal(rng);
    return std::exp(location(x) + scale(x) * eps);
  };
}

/// T = eta T* + (1 - eta) infinity, eta ~ Bernoulli(0.6)
EventFn cured(EventFn base) {
  return [base](const Vec &x, double theta, CounterRng &rng) {
    const bool susceptible = rng.uniform() < 0.6;
    const double t = base(x, theta, rng);
    return susceptible ? t : kInf;
  };
}

CensorFn unit_censor() {
  return [](const Vec &, CounterRng &rng) { return unit_exponential(rng); };
}
CensorFn censor_exp_mean(std::function<double(const Vec &)> mean) {
  return [mean](const Vec &x, CounterRng &rng) { return mean(x) * unit_exponential(rng); };
}

double sum_of(const Vec &x) { return x.sum(); }

std::vector<Definition> build_catalog() {
  std::vector<Definition> defs;
  auto add = [&](std::string id, std::string desc, CensoringMode mode, std::size_t p, bool null,
                 CovariateFn cov, EventFn ev, CensorFn cen, bool theta = false, bool cfg_p = false) {
    defs.push_back({{std::move(id), std::move(desc), mode, p, null, theta, cfg_p}, std::move(cov),
                    std::move(ev), std::move(cen)});
  };
  const auto em = CensoringMode::EventMean;
  const auto cm = CensoringMode::CensorMean;
  const auto clm = CensoringMode::CensorLogMean;

  // Type-I error: T ~ Exp(lambda) independent of X.
  add("ex1-case1", "T~Exp(lambda), C~Exp(1), X~U[-1,1]", em, 1, true, unif1(), unit_event(),
      censor_exp_mean([](const Vec &) { return 1.0; }));
  add("ex1-case2", "T~Exp(lambda), C~Exp(e^{X/3}), X~U[-1,1]", em, 1, true, unif1(), unit_event(),
      censor_exp_mean([](const Vec &x) { return std::exp(x(0) / 3.0); }));
  add("ex1-case3", "T~Exp(lambda), C~Weib(shape 3.35+1.75X, scale 1), X~U[-1,1]", em, 1, true, unif1(),
      unit_event(), [](const Vec &x, CounterRng &rng) { return weibull(3.35 + 1.75 * x(0), 1.0, rng); });
  add("ex1-case4", "T~Exp(lambda), C~Exp(e^{1'X/20}), X~N_10(0,Sigma)", em, 10, true, ar1(),
      unit_event(), censor_exp_mean([](const Vec &x) { return std::exp(sum_of(x) / 20.0); }));

  // Dependence shapes, C ~ Exp(lambda).
  auto one = [](const Vec &) { return 1.0; };
  add("ex2-loglinear", "log T = 0.5X + eps", cm, 1, false, unif1(),
      log_linear([](const Vec &x) { return 0.5 * x(0); }, one), unit_censor());
  add("ex2-logquadratic", "log T = 1.2X^2 + eps", cm, 1, false, unif1(),
      log_linear([](const Vec &x) { return 1.2 * x(0) * x(0); }, one), unit_censor());
  add("ex2-logcubic", "log T = X^3 + eps", cm, 1, false, unif1(),
      log_linear([](const Vec &x) { return x(0) * x(0) * x(0); }, one), unit_censor());
  add("ex2-logcosine", "log T = 0.5cos(3X) + eps", cm, 1, false, unif1(),
      log_linear([](const Vec &x) { return 0.5 * std::cos(3.0 * x(0)); }, one), unit_censor());
  add("ex2-logtwolines", "log T = 4(I(A=1)X - I(A=0)X) + eps, A~B(1,0.5)", cm, 1, false, unif1(),
      [](const Vec &x, double, CounterRng &rng) {
        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        return std::exp(4.0 * sign * x(0) + standard_normal(rng));
      },
      unit_censor());
  add("ex2-logcircle", "log T = I(X1^2+X2^2<=0.5) + eps, X1,X2~U[-1,1]", cm, 2, false,
      [](std::size_t, CounterRng &rng) {
        Vec x(2);
        x(0) = uniform_pm1(rng);
        x(1) = uniform_pm1(rng);
        return x;
      },
      log_linear([](const Vec &x) { return x.squaredNorm() <= 0.5 ? 1.0 : 0.0; }, one), unit_censor());

  // Cox and AFT models with six correlated covariates.
  const std::vector<std::pair<std::string, EventFn>> ex3 = {
      {"T~Exp(e^{1'X/10})", exp_mean([](const Vec &x) { return std::exp(sum_of(x) / 10.0); })},
      {"T~Exp(e^{(b'X)^2/2})", exp_mean([](const Vec &x) {
         const double s = beta_ex3().dot(x);
         return std::exp(s * s / 2.0);
       })},
      {"log T = 0.2b'X + 2eps",
       log_linear([](const Vec &x) { return 0.2 * beta_ex3().dot(x); }, [](const Vec &) { return 2.0; })},
      {"log T = -0.5(b'X)^2 + 4eps", log_linear(
                                          [](const Vec &x) {
                                            const double s = beta_ex3().dot(x);
                                            return -0.5 * s * s;
                                          },
                                          [](const Vec &) { return 4.0; })},
      {"log T = 0.25b1'X + 1.5(b2'X)eps",
       log_linear([](const Vec &x) { return 0.25 * beta1_ex3().dot(x); },
                  [](const Vec &x) { return 1.5 * beta2_ex3().dot(x); })},
      {"log T = 2(b1'X)^2 + 0.15(b2'X)eps", log_linear(
                                                 [](const Vec &x) {
                                                   const double s = beta1_ex3().dot(x);
                                                   return 2.0 * s * s;
                                                 },
                                                 [](const Vec &x) { return 0.15 * beta2_ex3().dot(x); })},
  };
  for (std::size_t c = 0; c < ex3.size(); ++c) {
    const std::string k = std::to_string(c + 1);
    add("ex3-case" + k, ex3[c].first + ", C~Exp(lambda), X~N_6(0,Sigma)", cm, 6, false, ar1(),
        ex3[c].second, unit_censor());
  }
  for (std::size_t c = 0; c < ex3.size(); ++c) {
    const std::string k = std::to_string(c + 1);
    add("ex5-case" + k, ex3[c].first + ", C~Exp(e^{lambda+X1}), X~N_6(0,Sigma)", clm, 6, false, ar1(),
        ex3[c].second, unit_censor());
  }

  // Cure-rate mixtures, eta ~ B(1, 0.6).
  add("ex4-cure1", "cure mixture, T*~Exp(e^{0.5X}), X~N(0,1)", cm, 1, false, normal1(),
      cured(exp_mean([](const Vec &x) { return std::exp(0.5 * x(0)); })), unit_censor());
  add("ex4-cure2", "cure mixture, T*~Exp(e^{0.5X^2}), X~N(0,1)", cm, 1, false, normal1(),
      cured(exp_mean([](const Vec &x) { return std::exp(0.5 * x(0) * x(0)); })), unit_censor());
  add("ex4-cure3", "cure mixture, log T* = 0.5b'X + 3eps, X~N_6(0,Sigma)", cm, 6, false, ar1(),
      cured(log_linear([](const Vec &x) { return 0.5 * beta_ex4().dot(x); },
                       [](const Vec &) { return 3.0; })),
      unit_censor());
  add("ex4-cure4", "cure mixture, log T* = 0.2(b'X)^3 + eps, X~N_6(0,Sigma)", cm, 6, false, ar1(),
      cured(log_linear(
          [](const Vec &x) {
            const double s = beta_ex4().dot(x);
            return 0.2 * s * s * s;
          },
          one)),
      unit_censor());

  // Small deviations from the null, C ~ Exp(3).
  add("ex6-case1", "log T = theta X + eps, C~Exp(3), X~N(0,1)", CensoringMode::Fixed, 1,
      false, normal1(),
      [](const Vec &x, double theta, CounterRng &rng) {
        return std::exp(theta * x(0) + standard_normal(rng));
      },
      censor_exp_mean([](const Vec &) { return 3.0; }), true);
  add("ex6-case2", "log T = theta X^2 + eps, C~Exp(3), X~N(0,1)", CensoringMode::Fixed, 1,
      false, normal1(),
      [](const Vec &x, double theta, CounterRng &rng) {
        return std::exp(theta * x(0) * x(0) + standard_normal(rng));
      },
      censor_exp_mean([](const Vec &) { return 3.0; }), true);

  // Discrete, heavy-tailed and high-dimensional covariates.
  auto c_x3 = censor_exp_mean([](const Vec &x) { return std::exp(x(0) / 3.0); });
  add("appC-poisson", "T~Exp(lambda), C~Exp(e^{X/3}), X~Poisson(3)", em, 1, true, poisson3(),
      unit_event(), c_x3);
  add("appC-t3", "T~Exp(lambda), C~Exp(e^{X/3}), X~t(3)", em, 1, true, student_t3(), unit_event(),
      c_x3);
  add("appC-highdim", "T~Exp(lambda), C~Exp(e^{1'X/20}), X~N_p(0,Sigma)", em, 20, true, ar1(),
      unit_event(), censor_exp_mean([](const Vec &x) { return std::exp(sum_of(x) / 20.0); }), false,
      true);
  auto squared_sum = exp_mean([](const Vec &x) {
    const double s = sum_of(x);
    return std::exp(s * s / 5.0);
  });
  add("appC-power-poisson", "T~Exp(e^{X^2/5}), C~Exp(lambda), X~Poisson(3)", cm, 1, false,
      poisson3(), squared_sum, unit_censor());
  add("appC-power-t3", "T~Exp(e^{X^2/5}), C~Exp(lambda), X~t(3)", cm, 1, false, student_t3(),
      squared_sum, unit_censor());
  add("appC-power-normal", "T~Exp(e^{X^2/5}), C~Exp(lambda), X~N(0,1)", cm, 1, false, normal1(),
      squared_sum, unit_censor());
  add("appC-power-highdim", "T~Exp(e^{(1'X)^2/5}), C~Exp(lambda), X~N_p(0,Sigma)", cm, 20, false,
      ar1(), squared_sum, unit_censor(), false, true);
  add("appC-beta-linear", "linear Cox, T~Exp(e^{X/5}), C~Exp(lambda), X~N(0,1)", cm, 1, false,
      normal1(), exp_mean([](const Vec &x) { return std::exp(x(0) / 5.0); }), unit_censor());
  add("appC-beta-nonlinear", "nonlinear Cox, T~Exp(e^{X^2/2}), C~Exp(lambda), X~N(0,1)", cm, 1,
      false, normal1(), exp_mean([](const Vec &x) { return std::exp(x(0) * x(0) / 2.0); }),
      unit_censor());
  return defs;
}

const std::vector<Definition> &definitions() {
  static const std::vector<Definition> defs = build_catalog();
  return defs;
}

const Definition &definition(const std::string &id) {
  for (const auto &d : definitions())
    if (d.info.id == id) return d;
  throw Error(ErrorCode::UnknownScenario, "unknown scenario \"" + id + "\"");
}

// One latent draw with the lambda-dependent part kept separate.
struct Base {
  double t;   // T, or the unit-mean part of T for EventMean
  double c;   // C, or the unit-mean part of C for CensorMean / CensorLogMean
  double x1;  // first covariate
};

Base draw_base(const Definition &def, const ScenarioSpec &spec, std::size_t p, CounterRng &rng,
               Vec *x_out) {
  Vec x = def.covariates(p, rng);
  const double t = def.event(x, spec.theta, rng);
  const double c = def.censor(x, rng);
  Base b{t, c, x(0)};
  if (x_out != nullptr) *x_out = std::move(x);
  return b;
}

std::pair<double, double> apply_lambda(CensoringMode mode, const Base &b, double lambda) {
  switch (mode) {
    case CensoringMode::EventMean: return {lambda * b.t, b.c};
    case CensoringMode::CensorMean: return {b.t, lambda * b.c};
    case CensoringMode::CensorLogMean: return {b.t, std::exp(lambda + b.x1) * b.c};
    case CensoringMode::Fixed: return {b.t, b.c};
  }
  return {b.t, b.c};
}

double require_lambda(const Definition &def, std::optional<double> lambda) {
  if (def.info.mode == CensoringMode::Fixed) return 0.0;
  if (!lambda)
    throw Error(ErrorCode::UncalibratedCensoring,
                "scenario " + def.info.id + " needs a calibrated censoring parameter");
  return *lambda;
}

}  // namespace

const std::vector<ScenarioInfo> &scenario_catalog() {
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> out;
    for (const auto &d : definitions()) out.push_back(d.info);
    return out;
  }();
  return infos;
}

const ScenarioInfo &scenario_info(const std::string &id) { return definition(id).info; }

std::size_t effective_dim(const ScenarioSpec &spec) {
  const auto &info = scenario_info(spec.id);
  return spec.p == 0 ? info.default_p : spec.p;
}

void validate_scenario(const ScenarioSpec &spec) {
  const auto &info = scenario_info(spec.id);
  if (spec.n < CensoredDataset::kMinObservations)
    throw Error(ErrorCode::InvalidConfig, "scenario sample size must be >= 5");
  if (spec.p != 0 && spec.p != info.default_p && !info.configurable_p)
    throw Error(ErrorCode::InvalidConfig, "scenario " + spec.id + " has fixed dimension");
  if (spec.target_censoring && !(*spec.target_censoring > 0.0 && *spec.target_censoring < 1.0))
    throw Error(ErrorCode::InvalidConfig, "target censoring must lie in (0, 1)");
  if (!std::isfinite(spec.theta)) throw Error(ErrorCode::InvalidConfig, "theta must be finite");
}

LatentSample generate_latent(const ScenarioSpec &spec, std::optional<double> lambda, std::size_t n,
                             CounterRng &rng) {
  const Definition &def = definition(spec.id);
  const double lam = require_lambda(def, lambda);
  const std::size_t p = effective_dim(spec);
  LatentSample out;
  out.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  out.t.resize(n);
  out.c.resize(n);
  Vec x;
  for (std::size_t i = 0; i < n; ++i) {
    const Base b = draw_base(def, spec, p, rng, &x);
    const auto [t, c] = apply_lambda(def.info.mode, b, lam);
    out.x.row(static_cast<Eigen::Index>(i)) = x.transpose();
    out.t[i] = t;
    out.c[i] = c;
  }
  return out;
}

CensoredDataset generate(const ScenarioSpec &spec, std::optional<double> lambda, CounterRng &rng) {
  validate_scenario(spec);
  LatentSample latent = generate_latent(spec, lambda, spec.n, rng);
  std::vector<double> y(spec.n);
  std::vector<int> delta(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    // A cured subject (t = inf) is always censored at C.
    delta[i] = latent.t[i] <= latent.c[i] ? 1 : 0;
    y[i] = delta[i] == 1 ? latent.t[i] : latent.c[i];
  }
  return make_dataset(std::move(y), std::move(delta), std::move(latent.x));
}

double censoring_fraction(const ScenarioSpec &spec, std::optional<double> lambda, std::size_t draws,
                          std::uint64_t seed) {
  const Definition &def = definition(spec.id);
  const double lam = require_lambda(def, lambda);
  const std::size_t p = effective_dim(spec);
  CounterRng rng(seed, 0);
  std::size_t censored = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const auto [t, c] = apply_lambda(def.info.mode, draw_base(def, spec, p, rng, nullptr), lam);
    if (t > c) ++censored;
  }
  return static_cast<double>(censored) / static_cast<double>(draws);
}

double calibrate_censoring(const ScenarioSpec &spec, double target, std::uint64_t seed,
                           const CalibrationOptions &opts) {
  const Definition &def = definition(spec.id);
  if (def.info.mode == CensoringMode::Fixed)
    throw Error(ErrorCode::NotApplicable, "scenario " + spec.id + " has a fully specified censoring law");
  if (!(target > 0.0 && target < 1.0))
    throw Error(ErrorCode::BracketFailure, "target censoring must lie strictly inside (0, 1)");

  const std::size_t p = effective_dim(spec);
  CounterRng rng(seed, 0);
  std::vector<Base> bases(opts.draws);
  for (auto &b : bases) b = draw_base(def, spec, p, rng, nullptr);

  // EventMean and CensorMean are searched on log(lambda), CensorLogMean on lambda.
  const bool log_scale = def.info.mode != CensoringMode::CensorLogMean;
  auto to_lambda = [&](double u) { return log_scale ? std::exp(u) : u; };
  auto fraction = [&](double u) {
    const double lam = to_lambda(u);
    std::size_t censored = 0;
    for (const auto &b : bases) {
      const auto [t, c] = apply_lambda(def.info.mode, b, lam);
      if (t > c) ++censored;
    }
    return static_cast<double>(censored) / static_cast<double>(bases.size());
  };

  double lo = log_scale ? std::log(1e-8) : -5.0;
  double hi = log_scale ? std::log(1e8) : 5.0;
  double f_lo = fraction(lo);
  double f_hi = fraction(hi);
  const bool increasing = f_hi >= f_lo;
  if (target < std::min(f_lo, f_hi) || target > std::max(f_lo, f_hi))
    throw Error(ErrorCode::BracketFailure, "target censoring not reachable for scenario " + spec.id);

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_iterations; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = fraction(mid);
    if (std::abs(f - target) <= opts.tolerance) break;
    if ((f < target) == increasing)
      lo = mid;
    else
      hi = mid;
  }
  return to_lambda(mid);
}

}  // namespace sid
