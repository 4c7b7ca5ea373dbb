#include "sid/bootstrap.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "sid/numeric.hpp"
#include "sid/parallel.hpp"
#include "sid/rng.hpp"

namespace sid {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool all_rows_identical(const Eigen::MatrixXd &x) {
  for (Eigen::Index i = 1; i < x.rows(); ++i)
    if (x.row(i) != x.row(0)) return false;
  return true;
}

double resolve_gamma(const std::optional<double> &gamma, const Eigen::MatrixXd &x) {
  if (gamma) return *gamma;
  // Any scale gives a constant Gram matrix when the covariates coincide.
  if (all_rows_identical(x)) return 1.0;
  return median_heuristic(x);
}

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

BootstrapMatrix build_bootstrap_matrix(const Eigen::MatrixXd &kmat, const SmoothedProcesses &sp) {
  const auto n = static_cast<Eigen::Index>(sp.n);
  const auto ne = static_cast<Eigen::Index>(sp.event_count());
  // U-hat is invariant to K + c; anchoring makes constant covariates give M = 0 exactly.
  const Eigen::MatrixXd k = kmat.array() - kmat(0, 0);

  const Eigen::MatrixXd ka = k * sp.a;
  Eigen::MatrixXd v(n, ne);
  Eigen::MatrixXd mean_k(n, ne);
  Eigen::VectorXd grand(ne);
  for (Eigen::Index e = 0; e < ne; ++e) {
    const double at_risk = sp.a.col(e).sum();
    v.col(e) = sp.w.col(e) * sp.s_hat(e) - sp.a.col(e) * sp.f_hat(e);
    mean_k.col(e) = ka.col(e) / at_risk;
    grand(e) = sp.a.col(e).dot(ka.col(e)) / (at_risk * at_risk);
  }

  // sum_e (K - m 1^T - 1 m^T + g) o (v v^T)
  const Eigen::MatrixXd vv = v * v.transpose();
  const Eigen::MatrixXd p = mean_k.cwiseProduct(v) * v.transpose();
  const Eigen::MatrixXd g = v * grand.asDiagonal() * v.transpose();
  Eigen::MatrixXd full = (k.cwiseProduct(vv) - p - p.transpose() + g) / static_cast<double>(n);

  BootstrapMatrix out;
  out.m.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.m(j, j) = full(j, j);
    for (Eigen::Index i = 0; i < j; ++i) {
      out.m(i, j) = full(i, j);
      out.m(j, i) = full(i, j);
    }
  }
  return out;
}

BootstrapMatrix build_bootstrap_matrix(const CensoredDataset &ds, const CovariateKernel &k,
                                       const SmoothingSpec &spec) {
  return build_bootstrap_matrix(gram_matrix(ds.covariates(), k), build_smoothed_processes(ds, spec));
}

std::string to_string(BootstrapVariant v) { return v == BootstrapVariant::UWild ? "uwild" : "vwild"; }

BootstrapVariant parse_bootstrap_variant(const std::string &name) {
  if (name == "uwild" || name == "UWild") return BootstrapVariant::UWild;
  if (name == "vwild" || name == "VWild") return BootstrapVariant::VWild;
  throw Error(ErrorCode::InvalidConfig, "unknown bootstrap variant \"" + name + "\"");
}

std::vector<double> MultiplierStream::draw(std::uint64_t replicate, std::size_t n) const {
  CounterRng rng(seed_, replicate);
  std::vector<double> e(n);
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) bits = rng();
    e[i] = (bits & 1u) ? 1.0 : -1.0;
    bits >>= 1;
  }
  return e;
}

double wild_statistic(const BootstrapMatrix &m, std::span<const double> e, BootstrapVariant variant) {
  const std::size_t n = m.size();
  if (e.size() != n) throw Error(ErrorCode::BadMultiplier, "multiplier length differs from n");
  for (double x : e)
    if (x != 1.0 && x != -1.0) throw Error(ErrorCode::BadMultiplier, "multipliers must be +1 or -1");

  double off = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < j; ++i)
      col += e[i] * m.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    off += col * e[j];
  }
  const double nn = static_cast<double>(n);
  if (variant == BootstrapVariant::UWild) return 2.0 * off / (nn * (nn - 1.0));
  return (2.0 * off + m.m.trace()) / (nn * nn);
}

TestDivergence parse_method(const std::string &name) {
  if (name == "sid-gauss") return GaussianSid{};
  if (name == "sid-lap") return LaplacianSid{};
  const std::string prefix = "sid-";
  if (name.rfind(prefix, 0) == 0) {
    const std::string tail = name.substr(prefix.size());
    double beta = 0.0;
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), beta);
    if (ec == std::errc() && ptr == tail.data() + tail.size() && !tail.empty()) {
      if (!(beta > 0.0 && beta < 2.0))
        throw Error(ErrorCode::InvalidKernel, "beta must lie in (0, 2): " + name);
      return BetaSid{beta};
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown method \"" + name + "\"");
}

std::string method_name(const TestDivergence &d) {
  return std::visit(overloaded{
                        [](const GaussianSid &) { return std::string("sid-gauss"); },
                        [](const LaplacianSid &) { return std::string("sid-lap"); },
                        [](const BetaSid &b) { return "sid-" + shortest(b.beta); },
                    },
                    d);
}

void validate_config(const TestConfig &cfg) {
  if (cfg.bootstrap_reps < 1) throw Error(ErrorCode::InvalidConfig, "bootstrap replicates must be >= 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0, 1)");
  if (!(cfg.bandwidth_constant > 0.0))
    throw Error(ErrorCode::InvalidConfig, "bandwidth constant must be positive");
  if (cfg.smoothing) validate_smoothing(*cfg.smoothing);
}

double critical_value(std::span<const double> draws, double alpha) {
  if (draws.empty()) throw Error(ErrorCode::InvalidConfig, "no bootstrap draws");
  const double b = static_cast<double>(draws.size());
  // Guard against (1 - alpha) * B landing a hair above an integer.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, draws.size());
  std::vector<double> sorted(draws.begin(), draws.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
  return sorted[rank - 1];
}

double monte_carlo_p_value(double observed, std::span<const double> draws) {
  const auto exceed = std::count_if(draws.begin(), draws.end(), [&](double d) { return d >= observed; });
  return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(draws.size()) + 1.0);
}

bool rejects(double observed, std::span<const double> draws, double alpha) {
  if (observed < critical_value(draws, alpha)) return false;
  return std::any_of(draws.begin(), draws.end(), [&](double d) { return d < observed; });
}

TestResult finalize_result(double statistic, double scaled_statistic, std::vector<double> draws,
                           double alpha) {
  TestResult r;
  r.statistic = statistic;
  r.scaled_statistic = scaled_statistic;
  r.critical_value = critical_value(draws, alpha);
  r.p_value = monte_carlo_p_value(scaled_statistic, draws);
  r.reject = rejects(scaled_statistic, draws, alpha);
  r.alpha = alpha;
  r.bootstrap_draws = std::move(draws);
  return r;
}

TestResult run_test(const CensoredDataset &ds, const TestConfig &cfg, const TestDivergence &div) {
  validate_config(cfg);
  const SmoothingSpec spec =
      cfg.smoothing ? *cfg.smoothing
                    : SmoothingSpec{cfg.w_kernel, silverman_bandwidth(ds.times(), cfg.bandwidth_constant)};

  std::optional<double> gamma_used;
  double factor = 1.0;
  const CovariateKernel kernel = std::visit(
      overloaded{
          [&](const GaussianSid &g) -> CovariateKernel {
            gamma_used = resolve_gamma(g.gamma, ds.covariates());
            return GaussianKernel{*gamma_used};
          },
          [&](const LaplacianSid &l) -> CovariateKernel {
            gamma_used = resolve_gamma(l.gamma, ds.covariates());
            return LaplacianKernel{*gamma_used};
          },
          [&](const BetaSid &b) -> CovariateKernel {
            factor = 2.0;
            return DistanceInducedKernel{b.beta};
          },
      },
      div);

  const Eigen::MatrixXd kmat = gram_matrix(ds.covariates(), kernel);
  const SmoothedProcesses sp = build_smoothed_processes(ds, spec);
  const double statistic =
      factor * (cfg.variant == BootstrapVariant::VWild ? v_event_sum(kmat, sp) : u_statistic(kmat, sp));

  BootstrapMatrix m = build_bootstrap_matrix(kmat, sp);
  m.m *= factor;

  const double n = static_cast<double>(ds.size());
  const double scale = n * std::sqrt(spec.h);
  const MultiplierStream stream(cfg.seed);
  std::vector<double> draws(static_cast<std::size_t>(cfg.bootstrap_reps));
  parallel_for(draws.size(), cfg.threads, [&](std::size_t b) {
    const auto e = stream.draw(b, ds.size());
    draws[b] = scale * wild_statistic(m, e, cfg.variant);
  });

  TestResult r = finalize_result(statistic, scale * statistic, std::move(draws), cfg.alpha);
  r.h_used = spec.h;
  r.gamma_used = gamma_used;
  r.seed = cfg.seed;
  r.variant = cfg.variant;
  return r;
}

NullDiagnostics bootstrap_null_diagnostics(const BootstrapMatrix &m, int reps, std::uint64_t seed) {
  if (reps < 1000) throw Error(ErrorCode::InvalidConfig, "diagnostics need at least 1000 replicates");
  const std::size_t n = m.size();
  const MultiplierStream stream(seed);
  std::vector<double> draws(static_cast<std::size_t>(reps));
  for (std::size_t b = 0; b < draws.size(); ++b)
    draws[b] = wild_statistic(m, stream.draw(b, n), BootstrapVariant::UWild);

  NullDiagnostics d;
  d.mean = compensated_sum(draws) / static_cast<double>(reps);
  CompensatedSum ss;
  for (double x : draws) ss.add((x - d.mean) * (x - d.mean));
  d.variance = ss.value() / static_cast<double>(reps - 1);

  CompensatedSum sq;
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) {
      const double v = m.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      sq.add(v * v);
    }
  const double nn = static_cast<double>(n);
  const double norm = 2.0 / (nn * (nn - 1.0));
  d.exact_mean = 0.0;
  d.exact_variance = norm * norm * sq.value();
  return d;
}

}  // namespace sid
