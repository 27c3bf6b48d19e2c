#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace kgbench {

// mt19937_64 output is fixed by the standard; the helpers below avoid the
// implementation-defined std distributions so results match across toolchains.
using Rng = std::mt19937_64;

enum class SeedPurpose : std::uint64_t {
  split = 1,
  negatives = 2,
  embedding = 3,
  ablation = 4,
  factor = 5,
  run = 6,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Independent stream seed keyed by an arbitrary tuple of integers.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept;

inline std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose,
                                 std::initializer_list<std::uint64_t> keys = {}) noexcept {
  std::uint64_t s = derive_seed(master, {static_cast<std::uint64_t>(purpose)});
  return keys.size() == 0 ? s : derive_seed(s, keys);
}

// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Uniform double in [0, 1).
double uniform01(Rng& rng) noexcept;

inline double uniform_real(Rng& rng, double lo, double hi) noexcept {
  return lo + (hi - lo) * uniform01(rng);
}

template <class T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace kgbench
