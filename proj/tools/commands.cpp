#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sid/bootstrap.hpp"
#include "sid/csv.hpp"
#include "sid/report.hpp"
#include "sid/simulation.hpp"

namespace sid::cli {

namespace {

constexpr std::uint64_t kDefaultTestSeed = 20240229;

/// Errors that stem from the command line rather than from the data.
bool is_usage_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidKernel:
    case ErrorCode::InvalidSmoothing:
    case ErrorCode::UnknownScenario:
    case ErrorCode::UncalibratedCensoring:
    case ErrorCode::NotApplicable:
    case ErrorCode::BracketFailure:
      return true;
    default:
      return false;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_real(const std::string &s, const std::string &what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
    throw UsageError("invalid " + what + ": \"" + s + "\"");
  return v;
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Rounds away accumulated step error, so 0:0.6:0.2 yields 0.6 and not 0.6000000000000001.
double tidy(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

/// "key=a:b:step" or "key=v1,v2,...".
std::pair<std::string, std::vector<double>> parse_grid(const std::string &spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("grid must look like key=start:stop:step or key=v1,v2");
  const std::string key = spec.substr(0, eq);
  const std::string body = spec.substr(eq + 1);
  std::vector<double> values;
  if (body.find(':') != std::string::npos) {
    const auto parts = split(body, ':');
    if (parts.size() != 3) throw UsageError("grid range must be start:stop:step");
    const double start = parse_real(parts[0], "grid start");
    const double stop = parse_real(parts[1], "grid stop");
    const double step = parse_real(parts[2], "grid step");
    if (!(step > 0.0) || stop < start) throw UsageError("grid range needs step > 0 and stop >= start");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 10000) throw UsageError("grid has too many points");
    for (long k = 0; k < count; ++k) values.push_back(tidy(start + static_cast<double>(k) * step));
  } else {
    for (const auto &v : split(body, ',')) values.push_back(parse_real(v, "grid value"));
  }
  return {key, values};
}

std::vector<double> parse_alphas(const std::string &s) {
  std::vector<double> out;
  for (const auto &part : split(s, ',')) {
    const double a = parse_real(part, "alpha");
    if (!(a > 0.0 && a < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    out.push_back(a);
  }
  return out;
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
}

// --- test / censoring-test ---------------------------------------------------------

struct TestArgs {
  std::string input, time_col, status_col;
  std::vector<std::string> covariates;
  std::string kernel = "gauss";
  std::optional<double> beta, h, gamma;
  int B = 2000;
  double alpha = 0.05;
  std::uint64_t seed = kDefaultTestSeed;
  std::string variant = "vwild";
  std::string smoother = "gaussian";
  std::string output;
  unsigned threads = 1;
};

void add_test_options(CLI::App *cmd, TestArgs &a) {
  // -h is taken by the bandwidth flag.
  cmd->set_help_flag("--help", "print this help and exit");
  cmd->add_option("-i,--input", a.input, "CSV file with a header row")->required();
  cmd->add_option("--time", a.time_col, "observed time column")->required();
  cmd->add_option("--status", a.status_col, "event indicator column (1 = event)")->required();
  cmd->add_option("--cov", a.covariates, "covariate columns (comma separated or repeated)")
      ->required()
      ->delimiter(',');
  cmd->add_option("--kernel", a.kernel, "gauss | lap | beta")
      ->check(CLI::IsMember({"gauss", "lap", "beta"}))
      ->capture_default_str();
  cmd->add_option("--beta", a.beta, "exponent in (0, 2) for --kernel beta");
  cmd->add_option("--B", a.B, "bootstrap replicates")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--alpha", a.alpha, "significance level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "bootstrap seed")->capture_default_str();
  cmd->add_option("--variant", a.variant, "vwild | uwild")
      ->check(CLI::IsMember({"vwild", "uwild"}))
      ->capture_default_str();
  cmd->add_option("--h", a.h, "bandwidth (default: rule of thumb)")->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", a.gamma, "kernel scale (default: median heuristic)")->check(CLI::PositiveNumber);
  cmd->add_option("--smoother", a.smoother, "gaussian | epanechnikov")
      ->check(CLI::IsMember({"gaussian", "epanechnikov"}))
      ->capture_default_str();
  cmd->add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--output", a.output, "also write the JSON result to this file");
}

TestDivergence test_divergence(const TestArgs &a) {
  if (a.kernel == "beta") {
    if (!a.beta) throw UsageError("--kernel beta requires --beta");
    if (a.gamma) throw UsageError("--gamma does not apply to --kernel beta");
    if (!(*a.beta > 0.0 && *a.beta < 2.0)) throw UsageError("--beta must lie in (0, 2)");
    return BetaSid{*a.beta};
  }
  if (a.beta) throw UsageError("--beta requires --kernel beta");
  if (a.kernel == "lap") return LaplacianSid{a.gamma};
  return GaussianSid{a.gamma};
}

int cmd_test(const TestArgs &a, bool flip, std::ostream &out) {
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw UsageError("--alpha must lie in (0, 1)");
  const TestDivergence div = test_divergence(a);
  TestConfig cfg;
  cfg.w_kernel = parse_smoothing_kernel(a.smoother);
  if (a.h) cfg.smoothing = SmoothingSpec{cfg.w_kernel, *a.h};
  cfg.bootstrap_reps = a.B;
  cfg.alpha = a.alpha;
  cfg.seed = a.seed;
  cfg.variant = parse_bootstrap_variant(a.variant);
  cfg.threads = a.threads;
  validate_config(cfg);

  CensoredDataset ds = ingest_csv(std::filesystem::path(a.input), a.time_col, a.status_col, a.covariates);
  if (flip) ds = flip_censoring(ds);
  const std::string json = test_result_json(run_test(ds, cfg, div));
  if (!a.output.empty()) write_file(a.output, json + "\n");
  out << json << '\n';
  return 0;
}

// --- simulate / sweep --------------------------------------------------------------

struct SimArgs {
  std::string scenario;
  std::size_t n = 50;
  std::string censoring;
  std::size_t p = 0;
  double theta = 0.0;
  int reps = 300;
  int B = 500;
  std::string alphas = "0.01,0.05,0.1";
  std::vector<std::string> methods{"sid-gauss", "sid-lap", "sid-1", "sid-0.5"};
  std::uint64_t seed = 0;
  std::string variant = "vwild";
  std::string smoother = "gaussian";
  std::string output;
  unsigned threads = 1;
  std::string grid;
};

void add_sim_options(CLI::App *cmd, SimArgs &a, bool sweep) {
  if (sweep) {
    cmd->add_option("--family", a.scenario, "scenario id")->required();
    cmd->add_option("--grid", a.grid, "key=start:stop:step or key=v1,v2 with key n | theta | p | beta")
        ->required();
  } else {
    cmd->add_option("--scenario", a.scenario, "scenario id")->required();
  }
  cmd->add_option("--n", a.n, "sample size")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--censoring", a.censoring, "target censoring fraction, or \"fixed\"");
  cmd->add_option("--p", a.p, "covariate dimension for scenarios that allow it");
  cmd->add_option("--theta", a.theta, "effect size for theta-indexed scenarios")->capture_default_str();
  cmd->add_option("--reps", a.reps, "Monte Carlo replicates")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--B", a.B, "bootstrap replicates")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--alphas", a.alphas, "comma-separated levels")->capture_default_str();
  cmd->add_option("--methods", a.methods, "sid-gauss, sid-lap, sid-<beta>; sid-beta follows a beta grid")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "master seed")->required();
  cmd->add_option("--variant", a.variant, "vwild | uwild")
      ->check(CLI::IsMember({"vwild", "uwild"}))
      ->capture_default_str();
  cmd->add_option("--smoother", a.smoother, "gaussian | epanechnikov")
      ->check(CLI::IsMember({"gaussian", "epanechnikov"}))
      ->capture_default_str();
  cmd->add_option("--threads", a.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--output", a.output, "write <prefix>.json and <prefix>.csv");
}

ScenarioSpec scenario_from(const SimArgs &a) {
  ScenarioSpec spec;
  spec.id = a.scenario;
  spec.n = a.n;
  spec.p = a.p;
  spec.theta = a.theta;
  const ScenarioInfo &info = scenario_info(a.scenario);
  if (info.mode == CensoringMode::Fixed) {
    if (!a.censoring.empty() && a.censoring != "fixed")
      throw UsageError("scenario " + a.scenario + " has a fixed censoring law; use --censoring fixed");
  } else {
    if (a.censoring.empty() || a.censoring == "fixed")
      throw UsageError("scenario " + a.scenario + " needs --censoring in (0, 1)");
    spec.target_censoring = parse_real(a.censoring, "censoring");
  }
  validate_scenario(spec);
  return spec;
}

MonteCarloConfig mc_config(const SimArgs &a) {
  MonteCarloConfig cfg;
  cfg.reps = a.reps;
  cfg.bootstrap_reps = a.B;
  cfg.alphas = parse_alphas(a.alphas);
  cfg.seed = a.seed;
  cfg.variant = parse_bootstrap_variant(a.variant);
  cfg.w_kernel = parse_smoothing_kernel(a.smoother);
  cfg.threads = a.threads;
  return cfg;
}

int cmd_simulate(const SimArgs &a, std::ostream &out) {
  const ScenarioSpec spec = scenario_from(a);
  const MonteCarloConfig cfg = mc_config(a);
  for (const auto &m : a.methods) parse_method(m);
  const MonteCarloReport report = monte_carlo(spec, a.methods, cfg);

  write_summary(out, {report});
  if (a.output.empty()) {
    out << '\n';
    write_report_csv(out, report);
  } else {
    std::ostringstream csv;
    write_report_csv(csv, report);
    write_file(a.output + ".csv", csv.str());
    write_file(a.output + ".json", report_json(report) + "\n");
  }
  return 0;
}

int cmd_sweep(const SimArgs &a, std::ostream &out) {
  const auto [key, grid] = parse_grid(a.grid);
  if (key != "n" && key != "theta" && key != "p" && key != "beta")
    throw UsageError("grid key must be n, theta, p or beta");
  const ScenarioSpec spec = scenario_from(a);
  const MonteCarloConfig cfg = mc_config(a);
  for (const auto &m : a.methods)
    if (!(key == "beta" && m == "sid-beta")) parse_method(m);
  const auto reports = power_sweep(spec, key, grid, a.methods, cfg);

  write_summary(out, reports);
  if (a.output.empty()) {
    out << '\n';
    write_sweep_csv(out, reports);
  } else {
    std::ostringstream csv;
    write_sweep_csv(csv, reports);
    write_file(a.output + ".csv", csv.str());
    write_file(a.output + ".json", sweep_json(reports) + "\n");
  }
  return 0;
}

void list_scenarios(std::ostream &out) {
  for (const auto &s : scenario_catalog()) {
    char line[64];
    std::snprintf(line, sizeof line, "%-20s p=%-3zu %-6s ", s.id.c_str(), s.default_p,
                  s.null_hypothesis ? "null" : "alt");
    out << line << s.description << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Survival independence divergence tests for right-censored data", "sid"};
  app.require_subcommand(1);
  app.set_help_flag("-h,--help", "print this help and exit");

  TestArgs test_args, ctest_args;
  SimArgs sim_args, sweep_args;
  auto *test = app.add_subcommand("test", "test independence of the event time and covariates");
  add_test_options(test, test_args);
  auto *ctest = app.add_subcommand("censoring-test",
                                   "test independence of the censoring time and covariates");
  add_test_options(ctest, ctest_args);
  auto *simulate = app.add_subcommand("simulate", "Monte Carlo rejection rates for one scenario");
  add_sim_options(simulate, sim_args, false);
  auto *sweep = app.add_subcommand("sweep", "rejection rates along a parameter grid");
  add_sim_options(sweep, sweep_args, true);
  auto *scenarios = app.add_subcommand("scenarios", "list the scenario catalog");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (*test) return cmd_test(test_args, false, out);
    if (*ctest) return cmd_test(ctest_args, true, out);
    if (*simulate) return cmd_simulate(sim_args, out);
    if (*sweep) return cmd_sweep(sweep_args, out);
    if (*scenarios) {
      list_scenarios(out);
      return 0;
    }
  } catch (const UsageError &e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error &e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return is_usage_error(e.code()) ? 2 : 1;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace sid::cli
