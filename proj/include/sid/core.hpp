#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sid {

enum class ErrorCode {
  NonPositiveTime,
  NonBinaryStatus,
  InconsistentDimension,
  NonFiniteCovariate,
  NoEvents,
  TooFewObservations,
  EmptyInput,
  MissingColumn,
  ParseError,
  IoError,
  DimensionMismatch,
  InvalidKernel,
  InvalidSmoothing,
  DegenerateCovariates,
  DegenerateTimes,
  InstanceTooLarge,
  BadMultiplier,
  InvalidConfig,
  UnknownScenario,
  UncalibratedCensoring,
  NotApplicable,
  BracketFailure,
};

const char *to_string(ErrorCode code);

/// Library-wide exception. Every failure carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// One row of raw input: observed time Y = min(T, C), status delta = I(T <= C),
/// covariates X. Status is kept as a double so ingestion can reject values
/// such as 0.5 or 2 with a precise error.
struct RawObservation {
  double time;
  double status;
  std::vector<double> covariates;
};

struct CensoredObservation {
  double y;
  int delta;
  std::vector<double> x;

  bool operator==(const CensoredObservation &) const = default;
};

/// Validated, immutable sample of right-censored observations.
///
/// Guarantees: n >= 5, at least one event, every y finite and positive,
/// every delta in {0, 1}, every covariate vector of the same finite
/// dimension p. Row order is exactly the input order.
class CensoredDataset {
 public:
  static constexpr std::size_t kMinObservations = 5;

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(covariates_.cols()); }

  std::span<const double> times() const noexcept { return times_; }
  std::span<const int> status() const noexcept { return status_; }
  /// n x p, row i holds X_i.
  const Eigen::MatrixXd &covariates() const noexcept { return covariates_; }

  CensoredObservation observation(std::size_t i) const;
  std::size_t event_count() const noexcept;

  bool operator==(const CensoredDataset &other) const;

 private:
  friend CensoredDataset validate_dataset(std::span<const RawObservation> raw);
  friend CensoredDataset make_dataset(std::vector<double> times, std::vector<int> status,
                                      Eigen::MatrixXd covariates);

  CensoredDataset(std::vector<double> times, std::vector<int> status,
                  Eigen::MatrixXd covariates)
      : times_(std::move(times)), status_(std::move(status)),
        covariates_(std::move(covariates)) {}

  std::vector<double> times_;
  std::vector<int> status_;
  Eigen::MatrixXd covariates_;
};

CensoredDataset validate_dataset(std::span<const RawObservation> raw);

/// Column-form constructor used by the generators; runs the same checks as
/// validate_dataset.
CensoredDataset make_dataset(std::vector<double> times, std::vector<int> status,
                             Eigen::MatrixXd covariates);

/// Swaps the roles of event and censoring: delta'_i = 1 - delta_i. Used to
/// test whether the censoring time is independent of the covariates.
CensoredDataset flip_censoring(const CensoredDataset &ds);

/// Same observations, rows reordered so that row i of the result is row
/// order[i] of the input.
CensoredDataset permute_rows(const CensoredDataset &ds, std::span<const std::size_t> order);

/// Restricts the covariate vector to the listed columns.
CensoredDataset select_covariates(const CensoredDataset &ds, std::span<const std::size_t> cols);

}  // namespace sid
