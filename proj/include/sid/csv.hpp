#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "sid/core.hpp"

namespace sid {

/// Splits one CSV record into fields. Handles RFC-4180 quoting ("" escapes a
/// quote inside a quoted field). Embedded newlines are not supported.
std::vector<std::string> split_csv_record(const std::string &line);

/// Reads a survival dataset from comma-separated text with a header row.
/// Rows are mapped to observations in file order; blank lines are skipped.
CensoredDataset ingest_csv(std::istream &in, const std::string &time_col,
                           const std::string &status_col,
                           const std::vector<std::string> &covariate_cols);

CensoredDataset ingest_csv(const std::filesystem::path &path, const std::string &time_col,
                           const std::string &status_col,
                           const std::vector<std::string> &covariate_cols);

}  // namespace sid
