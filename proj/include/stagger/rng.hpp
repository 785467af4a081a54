#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace stagger {

// Seeded generator with draws that are identical across platforms.
//
// The engine is std::mt19937_64, whose output sequence the standard fixes.
// Standard distributions are implementation-defined, so every derived
// quantity (uniform reals, bounded integers, shuffles) is computed here
// from raw engine output.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  // Independent stream for (seed, stream) via a splitmix64 mix.
  static SeededRng derive(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace stagger
