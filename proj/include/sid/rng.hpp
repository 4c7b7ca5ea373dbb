#pragma once

#include <cstdint>
#include <limits>

namespace sid {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent key from a parent key and a stream label.
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t stream) noexcept {
  return mix64(mix64(key) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: the k-th output is a pure function of (key, k),
/// so any (seed, stream) pair reproduces the same sequence no matter which
/// thread draws it or in what order streams are visited.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept : key_(derive_key(seed, stream)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return at(counter_++); }

  /// Output at an arbitrary counter position; does not advance.
  result_type at(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter * 0xd1b54a32d192ed03ULL));
  }

  std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace sid
