#pragma once

#include <cmath>
#include <span>

namespace sid {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// n (n-1) (n-2) (n-3) (n-4) as a double.
inline double falling_factorial5(std::size_t n) noexcept {
  double out = 1.0;
  for (std::size_t k = 0; k < 5; ++k) out *= static_cast<double>(n) - static_cast<double>(k);
  return out;
}

}  // namespace sid
