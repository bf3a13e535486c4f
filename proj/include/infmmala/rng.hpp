#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace infmmala {

// Deterministic random stream used by all stochastic operations.
//
// Built on std::mt19937_64 (whose output sequence is pinned by the C++
// standard) with explicit output transforms, so a given seed reproduces
// the same draws regardless of standard-library vendor:
//   uniform()  u = (top 53 bits + 1) * 2^-53, in (0,1]; log(u) is finite
//   normal()   Box-Muller on uniform pairs, second variate cached
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

  double normal();
  void fill_normal(std::span<double> out);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Decorrelated child seed for stream `stream` of a base seed (splitmix64).
// Stream 0 is reserved for data simulation, stream 1+c for chain c.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace infmmala
