#include "sid/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sid {

const char *to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveTime: return "NonPositiveTime";
    case ErrorCode::NonBinaryStatus: return "NonBinaryStatus";
    case ErrorCode::InconsistentDimension: return "InconsistentDimension";
    case ErrorCode::NonFiniteCovariate: return "NonFiniteCovariate";
    case ErrorCode::NoEvents: return "NoEvents";
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidKernel: return "InvalidKernel";
    case ErrorCode::InvalidSmoothing: return "InvalidSmoothing";
    case ErrorCode::DegenerateCovariates: return "DegenerateCovariates";
    case ErrorCode::DegenerateTimes: return "DegenerateTimes";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::BadMultiplier: return "BadMultiplier";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::UncalibratedCensoring: return "UncalibratedCensoring";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::BracketFailure: return "BracketFailure";
  }
  return "Unknown";
}

namespace {

std::string row_message(std::size_t row, const std::string &what) {
  std::ostringstream os;
  os << "row " << row + 1 << ": " << what;
  return os.str();
}

void check_column_form(const std::vector<double> &times, const std::vector<int> &status,
                       const Eigen::MatrixXd &x) {
  const std::size_t n = times.size();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "dataset is empty");
  if (status.size() != n || static_cast<std::size_t>(x.rows()) != n)
    throw Error(ErrorCode::InconsistentDimension, "column lengths differ");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(times[i]) || times[i] <= 0.0)
      throw Error(ErrorCode::NonPositiveTime, row_message(i, "observed time must be finite and > 0"));
    if (status[i] != 0 && status[i] != 1)
      throw Error(ErrorCode::NonBinaryStatus, row_message(i, "status must be 0 or 1"));
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (!std::isfinite(x(static_cast<Eigen::Index>(i), c)))
        throw Error(ErrorCode::NonFiniteCovariate, row_message(i, "covariate is not finite"));
    }
  }
  if (n < CensoredDataset::kMinObservations)
    throw Error(ErrorCode::TooFewObservations, "need at least 5 observations");
  if (std::none_of(status.begin(), status.end(), [](int d) { return d == 1; }))
    throw Error(ErrorCode::NoEvents, "no uncensored observations");
}

}  // namespace

CensoredObservation CensoredDataset::observation(std::size_t i) const {
  const auto row = static_cast<Eigen::Index>(i);
  std::vector<double> x(dim());
  for (std::size_t c = 0; c < dim(); ++c) x[c] = covariates_(row, static_cast<Eigen::Index>(c));
  return {times_[i], status_[i], std::move(x)};
}

std::size_t CensoredDataset::event_count() const noexcept {
  return static_cast<std::size_t>(std::count(status_.begin(), status_.end(), 1));
}

bool CensoredDataset::operator==(const CensoredDataset &other) const {
  return times_ == other.times_ && status_ == other.status_ &&
         covariates_.rows() == other.covariates_.rows() &&
         covariates_.cols() == other.covariates_.cols() && covariates_ == other.covariates_;
}

CensoredDataset validate_dataset(std::span<const RawObservation> raw) {
  if (raw.empty()) throw Error(ErrorCode::EmptyInput, "dataset is empty");
  const std::size_t n = raw.size();
  const std::size_t p = raw.front().covariates.size();

  std::vector<double> times(n);
  std::vector<int> status(n);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i) {
    const auto &r = raw[i];
    if (!std::isfinite(r.time) || r.time <= 0.0)
      throw Error(ErrorCode::NonPositiveTime, row_message(i, "observed time must be finite and > 0"));
    if (r.status != 0.0 && r.status != 1.0)
      throw Error(ErrorCode::NonBinaryStatus, row_message(i, "status must be 0 or 1"));
    if (r.covariates.size() != p)
      throw Error(ErrorCode::InconsistentDimension,
                  row_message(i, "covariate dimension differs from the first row"));
    times[i] = r.time;
    status[i] = static_cast<int>(r.status);
    for (std::size_t c = 0; c < p; ++c)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = r.covariates[c];
  }
  check_column_form(times, status, x);
  return CensoredDataset(std::move(times), std::move(status), std::move(x));
}

CensoredDataset make_dataset(std::vector<double> times, std::vector<int> status,
                             Eigen::MatrixXd covariates) {
  check_column_form(times, status, covariates);
  return CensoredDataset(std::move(times), std::move(status), std::move(covariates));
}

CensoredDataset flip_censoring(const CensoredDataset &ds) {
  std::vector<int> flipped(ds.status().begin(), ds.status().end());
  for (int &d : flipped) d = 1 - d;
  if (std::none_of(flipped.begin(), flipped.end(), [](int d) { return d == 1; }))
    throw Error(ErrorCode::NoEvents, "every observation is an event; flipped data has no events");
  return make_dataset(std::vector<double>(ds.times().begin(), ds.times().end()), std::move(flipped),
                      ds.covariates());
}

CensoredDataset permute_rows(const CensoredDataset &ds, std::span<const std::size_t> order) {
  const std::size_t n = ds.size();
  if (order.size() != n) throw Error(ErrorCode::InconsistentDimension, "permutation length differs from n");
  std::vector<double> times(n);
  std::vector<int> status(n);
  Eigen::MatrixXd x(ds.covariates().rows(), ds.covariates().cols());
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = ds.times()[order[i]];
    status[i] = ds.status()[order[i]];
    x.row(static_cast<Eigen::Index>(i)) = ds.covariates().row(static_cast<Eigen::Index>(order[i]));
  }
  return make_dataset(std::move(times), std::move(status), std::move(x));
}

CensoredDataset select_covariates(const CensoredDataset &ds, std::span<const std::size_t> cols) {
  Eigen::MatrixXd x(ds.covariates().rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c] >= ds.dim()) throw Error(ErrorCode::DimensionMismatch, "covariate column out of range");
    x.col(static_cast<Eigen::Index>(c)) = ds.covariates().col(static_cast<Eigen::Index>(cols[c]));
  }
  return make_dataset(std::vector<double>(ds.times().begin(), ds.times().end()),
                      std::vector<int>(ds.status().begin(), ds.status().end()), std::move(x));
}

}  // namespace sid
