#include "sid/report.hpp"

#include <charconv>
#include <cstdio>

#include <json.hpp>

namespace sid {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json scenario_json(const ScenarioSpec &s) {
  ordered_json j;
  j["id"] = s.id;
  j["n"] = s.n;
  j["target_censoring"] = s.target_censoring ? ordered_json(*s.target_censoring) : ordered_json("fixed");
  j["p"] = s.p == 0 ? scenario_info(s.id).default_p : s.p;
  j["theta"] = s.theta;
  return j;
}

ordered_json report_object(const MonteCarloReport &r) {
  ordered_json j;
  j["scenario"] = scenario_json(r.scenario);
  j["lambda"] = r.lambda ? ordered_json(*r.lambda) : ordered_json(nullptr);
  if (r.grid_key) {
    j["grid_key"] = *r.grid_key;
    j["grid_value"] = *r.grid_value;
  }
  j["methods"] = r.methods;
  j["reps"] = r.reps;
  j["B"] = r.bootstrap_reps;
  j["alphas"] = r.alphas;
  ordered_json rates = ordered_json::array();
  for (const auto &m : r.results)
    for (std::size_t a = 0; a < r.alphas.size(); ++a)
      rates.push_back({{"method", m.method},
                       {"alpha", r.alphas[a]},
                       {"rejections", m.rejections[a]},
                       {"rate", m.rates[a]}});
  j["rejection_rates"] = std::move(rates);
  j["observed_censoring"] = r.observed_censoring;
  j["seed"] = r.seed;
  j["wall_time_sec"] = r.wall_time_sec;
  return j;
}

std::string censoring_label(const ScenarioSpec &s) {
  return s.target_censoring ? format_real(*s.target_censoring) : "fixed";
}

void write_rows(std::ostream &os, const MonteCarloReport &r, const std::string &prefix) {
  for (const auto &m : r.results)
    for (std::size_t a = 0; a < r.alphas.size(); ++a)
      os << prefix << r.scenario.id << ',' << m.method << ',' << format_real(r.alphas[a]) << ','
         << r.scenario.n << ',' << censoring_label(r.scenario) << ',' << r.reps << ','
         << r.bootstrap_reps << ',' << format_real(m.rates[a]) << ',' << r.seed << '\n';
}

constexpr const char *kCsvHeader = "scenario,method,alpha,n,censoring,reps,B,rate,seed";

}  // namespace

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string test_result_json(const TestResult &r) {
  ordered_json j;
  j["statistic"] = r.statistic;
  j["scaled_statistic"] = r.scaled_statistic;
  j["critical_value"] = r.critical_value;
  j["p_value"] = r.p_value;
  j["reject"] = r.reject;
  j["h"] = r.h_used;
  j["gamma"] = r.gamma_used ? ordered_json(*r.gamma_used) : ordered_json(nullptr);
  j["B"] = r.bootstrap_draws.size();
  j["alpha"] = r.alpha;
  j["seed"] = r.seed;
  j["variant"] = to_string(r.variant);
  return j.dump();
}

std::string report_json(const MonteCarloReport &r) { return report_object(r).dump(2); }

std::string sweep_json(const std::vector<MonteCarloReport> &reports) {
  ordered_json arr = ordered_json::array();
  for (const auto &r : reports) arr.push_back(report_object(r));
  return arr.dump(2);
}

void write_report_csv(std::ostream &os, const MonteCarloReport &r) {
  os << kCsvHeader << '\n';
  write_rows(os, r, "");
}

void write_sweep_csv(std::ostream &os, const std::vector<MonteCarloReport> &reports) {
  os << "grid_key,grid_value," << kCsvHeader << '\n';
  for (const auto &r : reports)
    write_rows(os, r, r.grid_key.value_or("") + "," + format_real(r.grid_value.value_or(0.0)) + ",");
}

void write_summary(std::ostream &os, const std::vector<MonteCarloReport> &reports) {
  char line[160];
  for (const auto &r : reports) {
    os << "scenario " << r.scenario.id << "  n=" << r.scenario.n
       << "  censoring=" << censoring_label(r.scenario);
    if (r.lambda) os << "  lambda=" << format_real(*r.lambda);
    if (r.grid_key) os << "  " << *r.grid_key << '=' << format_real(*r.grid_value);
    std::snprintf(line, sizeof line, "  observed=%.3f  reps=%d  B=%d  %.1fs\n", r.observed_censoring,
                  r.reps, r.bootstrap_reps, r.wall_time_sec);
    os << line;
    std::snprintf(line, sizeof line, "  %-12s", "method");
    os << line;
    for (double a : r.alphas) {
      std::snprintf(line, sizeof line, "  a=%-6s", format_real(a).c_str());
      os << line;
    }
    os << '\n';
    for (const auto &m : r.results) {
      std::snprintf(line, sizeof line, "  %-12s", m.method.c_str());
      os << line;
      for (double rate : m.rates) {
        std::snprintf(line, sizeof line, "  %8.3f", rate);
        os << line;
      }
      os << '\n';
    }
  }
}

}  // namespace sid
