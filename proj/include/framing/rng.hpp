// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace framing {

/// Counter-based SplitMix64 generator.
///
/// Draw k (k = 1, 2, ...) is mix64(seed + k * 0x9E3779B97F4A7C15) with the
/// standard SplitMix64 finalizer. Only integer arithmetic is involved, so the
/// stream is bit-identical on every platform. Floating-point and bounded
/// integer draws are derived from it by fixed recipes (see uniform() and
/// below()) instead of std:: distributions, whose output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();

  /// Uniform in [0, 1): top 53 bits of one draw times 2^-53.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection sampling; n must be > 0.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent stream keyed by a label; does not advance this generator.
  Rng derive(std::string_view stream) const;

  /// Fisher-Yates, last index first.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace framing
