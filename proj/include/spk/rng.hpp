#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "spk/errors.hpp"

namespace spk {

// Mixes a stream index into a base seed (splitmix64 finalizer). Used to derive
// independent sub-seeds for trees, repetitions and folds from one user seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random source. The engine is std::mt19937_64, whose raw output
// sequence is fixed by the C++ standard; the value mappings below are
// implemented here (not via std::uniform_*_distribution, which is
// implementation-defined) so identical seeds give identical datasets on every
// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_bits() { return engine_(); }

  // Uniform double in [lo, hi). Uses the top 53 bits of one engine output.
  double uniform(double lo, double hi) {
    double u = static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  // Uniform integer in [lo, hi], both inclusive. Unbiased via mask rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw DataError("uniform_int: empty range");
    std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (range == ~0ULL) return static_cast<std::int64_t>(next_bits());
    ++range;  // number of admissible values
    std::uint64_t mask =
        range <= (1ULL << 63) ? std::bit_ceil(range) - 1 : ~0ULL;
    for (;;) {
      std::uint64_t v = next_bits() & mask;
      if (v < range) return lo + static_cast<std::int64_t>(v);
    }
  }

  // Fisher-Yates shuffle, consuming one uniform_int per position.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i - 1)));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace spk
