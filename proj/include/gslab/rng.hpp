#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gslab::rng {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t combine(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return combine(combine(a, b), c);
}

/// Uniform double in the open interval (0, 1), 53 bits.
constexpr double to_unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Counter-based stream: the i-th draw depends only on (key, i).
class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next_u64() noexcept { return combine(key_, counter_++); }
  constexpr double next_unit() noexcept { return to_unit_open(next_u64()); }

  /// Uniform integer in [0, n), by rejection so every value is equally likely.
  constexpr std::uint64_t next_below(std::uint64_t n) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  /// Standard normal via Box-Muller; consumes two draws.
  double next_normal() noexcept {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Derive an independent child seed, e.g. one per trial.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index,
                               std::uint64_t purpose = 0) noexcept {
  return combine(seed, index, purpose);
}

}  // namespace gslab::rng
