#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace airslice {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair selects an
/// independent sequence; the position inside it is a plain counter, so
/// substreams never overlap and can be created in any order.
class Philox {
 public:
  using result_type = std::uint64_t;

  Philox(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n), unbiased. n must be > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Exponential with unit mean.
  double exponential();
  /// Poisson variate by inversion; intended for small means.
  std::int64_t poisson(double mean);

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;  // 64-bit halves consumed from buffer_ (0, 2, or 4 words)
};

/// Mixes a parent seed with a label into a child seed, so named substreams
/// ("placement", "fading", ...) are independent of each other.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace airslice
