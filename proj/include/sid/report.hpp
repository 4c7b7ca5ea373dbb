#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sid/bootstrap.hpp"
#include "sid/simulation.hpp"

namespace sid {

/// Shortest decimal string that parses back to exactly v.
std::string format_real(double v);

/// {statistic, scaled_statistic, critical_value, p_value, reject, h, gamma,
///  B, alpha, seed, variant}; gamma is null for SID_beta. One line, no
/// trailing newline.
std::string test_result_json(const TestResult &r);

/// A single report serializes as an object, a sweep as an array of them.
std::string report_json(const MonteCarloReport &r);
std::string sweep_json(const std::vector<MonteCarloReport> &reports);

/// One row per (method, alpha):
///   scenario,method,alpha,n,censoring,reps,B,rate,seed
/// Sweep rows carry two leading columns, grid_key,grid_value.
void write_report_csv(std::ostream &os, const MonteCarloReport &r);
void write_sweep_csv(std::ostream &os, const std::vector<MonteCarloReport> &reports);

/// Fixed-width rejection-rate table for terminals.
void write_summary(std::ostream &os, const std::vector<MonteCarloReport> &reports);

}  // namespace sid
