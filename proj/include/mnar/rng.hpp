#pragma once

#include <cstdint>

#include "mnar/error.hpp"
#include "mnar/mat.hpp"

namespace mnar {

// SplitMix64 finalizer, used both as a hash and as the output stage of the
// counter-based generator below. The generator is committed: changing it
// breaks bit-reproducibility of every seeded artifact output.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Counter-based stream: output i of stream (seed, stream) is
// mix64(base + (i+1) * golden), base = mix64(seed + golden) ^ mix64(stream + weyl).
// Draws depend only on (seed, stream, counter), never on call order across
// streams, so replications are order- and thread-count-independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix64(seed + 0x9e3779b97f4a7c15ULL) ^
              mix64(stream + 0xda942042e4dd58b5ULL)) {}

  std::uint64_t u64() { return mix64(base_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // uniform in [0, 1), 53-bit resolution
  double unif() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  double unif(double lo, double hi) { return lo + (hi - lo) * unif(); }

  bool bernoulli(double p) { return unif() < p; }

  // index in [0, pmf.size()) by CDF scan; pmf must sum to ~1
  int categorical(const Vector& pmf) {
    require(!pmf.empty(), Errc::contract, "categorical: empty pmf");
    double u = unif(), c = 0.0;
    for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
      c += pmf[i];
      if (u < c) return static_cast<int>(i);
    }
    return static_cast<int>(pmf.size()) - 1;
  }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace mnar
