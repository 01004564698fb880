#pragma once

// Counter-based random stream. Every draw is a pure function of
// (key, counter), so streams keyed on (seed, od, task, participant) can be
// regenerated in any order and on any thread count.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace wayfind::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Folds further key material into a stream key.
inline constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t part) {
  return splitmix64(key ^ splitmix64(part + 0x632BE59BD9B4E019ULL));
}

inline constexpr std::uint64_t derive(std::uint64_t key, std::string_view part) {
  return derive(key, fnv1a(part));
}

class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) : key_(splitmix64(key)) {}

  constexpr std::uint64_t next() {
    return splitmix64(key_ ^ (0xD1B54A32D192ED03ULL * ++counter_));
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  /// Standard normal via Box-Muller (no cached second variate, so the
  /// stream position is one counter step per pair of uniforms).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  [[nodiscard]] constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace wayfind::rng
