#include "sid/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace sid {

namespace {

std::string trim(const std::string &s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string &field, std::size_t row, const std::string &col) {
  const std::string t = trim(field);
  double value = 0.0;
  const char *begin = t.data();
  const char *end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end) {
    std::ostringstream os;
    os << "cannot parse \"" << t << "\" as a number at data row " << row << ", column " << col;
    throw Error(ErrorCode::ParseError, os.str());
  }
  return value;
}

std::size_t find_column(const std::vector<std::string> &header, const std::string &name) {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  throw Error(ErrorCode::MissingColumn, "column \"" + name + "\" not found in header");
}

}  // namespace

std::vector<std::string> split_csv_record(const std::string &line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

CensoredDataset ingest_csv(std::istream &in, const std::string &time_col,
                           const std::string &status_col,
                           const std::vector<std::string> &covariate_cols) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, "missing header row");
  std::vector<std::string> header = split_csv_record(line);
  for (auto &h : header) h = trim(h);

  const std::size_t t_idx = find_column(header, time_col);
  const std::size_t s_idx = find_column(header, status_col);
  std::vector<std::size_t> x_idx;
  x_idx.reserve(covariate_cols.size());
  for (const auto &name : covariate_cols) x_idx.push_back(find_column(header, name));

  std::vector<RawObservation> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const auto fields = split_csv_record(line);
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << "data row " << row << " has " << fields.size() << " fields, header has " << header.size();
      throw Error(ErrorCode::ParseError, os.str());
    }
    RawObservation obs;
    obs.time = parse_real(fields[t_idx], row, time_col);
    obs.status = parse_real(fields[s_idx], row, status_col);
    obs.covariates.reserve(x_idx.size());
    for (std::size_t c = 0; c < x_idx.size(); ++c)
      obs.covariates.push_back(parse_real(fields[x_idx[c]], row, covariate_cols[c]));
    rows.push_back(std::move(obs));
  }
  return validate_dataset(rows);
}

CensoredDataset ingest_csv(const std::filesystem::path &path, const std::string &time_col,
                           const std::string &status_col,
                           const std::vector<std::string> &covariate_cols) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return ingest_csv(in, time_col, status_col, covariate_cols);
}

}  // namespace sid
