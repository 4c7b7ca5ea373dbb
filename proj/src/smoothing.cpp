#include "sid/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sid/core.hpp"

namespace sid {

void validate_smoothing(const SmoothingSpec &spec) {
  if (!(spec.h > 0.0) || !std::isfinite(spec.h))
    throw Error(ErrorCode::InvalidSmoothing, "bandwidth must be positive and finite");
}

std::string to_string(SmoothingKernel k) {
  return k == SmoothingKernel::GaussianDensity ? "gaussian" : "epanechnikov";
}

SmoothingKernel parse_smoothing_kernel(const std::string &name) {
  if (name == "gaussian") return SmoothingKernel::GaussianDensity;
  if (name == "epanechnikov") return SmoothingKernel::Epanechnikov;
  throw Error(ErrorCode::InvalidSmoothing, "unknown smoothing kernel \"" + name + "\"");
}

double smoothing_density(SmoothingKernel k, double u) {
  switch (k) {
    case SmoothingKernel::GaussianDensity:
      return std::exp(-0.5 * u * u) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
    case SmoothingKernel::Epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

double smoothing_weight(const SmoothingSpec &spec, double u) {
  return smoothing_density(spec.w_kernel, u / spec.h) / spec.h;
}

double default_bandwidth_constant() {
  static const double c = std::pow(4.0 / 3.0, -0.2);
  return c;
}

double silverman_bandwidth(std::span<const double> y, double constant) {
  const std::size_t n = y.size();
  if (n < 2) throw Error(ErrorCode::DegenerateTimes, "bandwidth rule needs at least two times");
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); }))
    throw Error(ErrorCode::DegenerateTimes, "observed times have zero spread");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw Error(ErrorCode::DegenerateTimes, "observed times have zero spread");
  return constant * sd * std::pow(static_cast<double>(n), -0.2);
}

}  // namespace sid
