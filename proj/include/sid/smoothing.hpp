#pragma once

#include <span>
#include <string>

namespace sid {

enum class SmoothingKernel { GaussianDensity, Epanechnikov };

/// Time-smoothing density W and bandwidth h, giving W_h(u) = W(u / h) / h.
struct SmoothingSpec {
  SmoothingKernel w_kernel = SmoothingKernel::GaussianDensity;
  double h = 1.0;
};

void validate_smoothing(const SmoothingSpec &spec);
std::string to_string(SmoothingKernel k);
SmoothingKernel parse_smoothing_kernel(const std::string &name);

/// Unscaled density W(u).
double smoothing_density(SmoothingKernel k, double u);

/// W_h(u) = W(u / h) / h.
double smoothing_weight(const SmoothingSpec &spec, double u);

/// (4/3)^(-1/5) ~= 0.944088, the leading constant of the default bandwidth rule.
double default_bandwidth_constant();

/// h = c * sd(y) * n^(-1/5) with the n-1 sample standard deviation.
/// Throws DegenerateTimes when sd(y) == 0.
double silverman_bandwidth(std::span<const double> y, double constant = default_bandwidth_constant());

}  // namespace sid
