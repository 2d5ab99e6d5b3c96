#pragma once

#include <cstdint>

#include "spma/types.hpp"

namespace spma {

// splitmix64 generator.  Hand-rolled so that sampled trajectories and CSV
// output are bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform draw in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Index ~ weights / sum(weights) by inverse-CDF scan.  Weights must be
  // nonnegative with a positive sum.
  template <typename Row>
  int categorical(const Row& weights) {
    const auto n = static_cast<int>(weights.size());
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += weights[i];
    double u = uniform() * total;
    for (int i = 0; i < n; ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    // Roundoff can leave u at ~0; fall back to the last positive-weight index.
    for (int i = n - 1; i >= 0; --i) {
      if (weights[i] > 0.0) return i;
    }
    return n - 1;
  }

 private:
  std::uint64_t state_;
};

// Decorrelated seed for a named sub-stream of a run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng r(seed ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
  return r.next();
}

}  // namespace spma
