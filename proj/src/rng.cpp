#include "airslice/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace airslice {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> Philox::block(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

Philox::Philox(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

void Philox::refill() {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  buffer_ = block(ctr, key_);
  ++position_;
  used_ = 0;
}

Philox::result_type Philox::operator()() {
  if (used_ >= 4) refill();
  const std::uint64_t v = static_cast<std::uint64_t>(buffer_[used_]) |
                          (static_cast<std::uint64_t>(buffer_[used_ + 1]) << 32);
  used_ += 2;
  return v;
}

double Philox::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

__extension__ using u128 = unsigned __int128;

std::uint64_t Philox::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("below(0)");
  // Lemire's multiply-shift with rejection.
  u128 m = static_cast<u128>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Philox::exponential() { return -std::log1p(-uniform()); }

std::int64_t Philox::poisson(double mean) {
  if (!(mean >= 0.0) || mean > 500.0) throw std::domain_error("poisson mean out of range");
  if (mean == 0.0) return 0;
  const double u = uniform();
  double term = std::exp(-mean);
  double cdf = term;
  std::int64_t k = 0;
  while (u >= cdf && k < 10000) {
    ++k;
    term *= mean / static_cast<double>(k);
    cdf += term;
    if (term == 0.0) break;
  }
  return k;
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return splitmix(seed ^ splitmix(h));
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix(seed ^ splitmix(index + 0x632BE59BD9B4E019ull));
}

}  // namespace airslice
