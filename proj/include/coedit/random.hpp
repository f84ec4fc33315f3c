#pragma once

// Platform-stable randomness. The standard distributions are
// implementation-defined, so every draw used for reproducible output goes
// through these helpers on top of std::mt19937_64.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace coedit {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// FNV-1a; stable across platforms and runs.
std::uint64_t stable_hash(std::string_view text) noexcept;

/// Seed for an independent stream keyed by (seed, key).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  /// Uniform integer on [lo, hi], unbiased.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
  double exponential(double mean);
  double normal(double mean, double stddev);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, i - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace coedit
