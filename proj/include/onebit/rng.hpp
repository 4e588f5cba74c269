#pragma once

// Deterministic splittable random streams.
//
// Seeding is counter-based: every (base_seed, index...) combination is mixed
// through the SplitMix64 finalizer into an independent stream seed, so trials
// can be generated in any order (or skipped) without affecting each other.
// Normal deviates use Box-Muller on the raw 64-bit stream, which keeps the
// draw sequence identical across standard libraries and platforms.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace onebit {

namespace detail {
// SplitMix64 finalizer (public-domain constants).
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
}  // namespace detail

/// Derive a child seed from a parent seed and an index. Associative chains
/// of derive_seed() give every trial / stream its own well-separated seed.
inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return detail::mix64(parent + detail::kGolden * (index + 1));
}

/// Counter-based uniform stream: state advances by a fixed increment and the
/// output is the mixed counter (SplitMix64). Cheap to construct, O(1) state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform double in (0, 1]; never 0 so log() is safe.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (pairs cached).
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Unbiased uniform integer in [0, bound). bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % bound;
  }

  void fill_normal(std::vector<double>& out) {
    for (double& v : out) v = next_normal();
  }

  /// First k entries of a uniformly random permutation of {0, ..., n-1}
  /// (partial Fisher-Yates), returned unsorted.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace onebit
