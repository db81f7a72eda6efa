#pragma once

#include <cstdint>
#include <random>

#include "hwdd/types.hpp"

namespace hwdd {

// splitmix64 finalizer; used to decorrelate seeds and derive per-shot streams
std::uint64_t splitmix64(std::uint64_t x);

// deterministic sub-seed for shot `index` of ensemble `seed`
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index);

// Deterministic PRNG with a portable Gaussian transform. std::normal_distribution
// is implementation-defined, so Box-Muller keeps the seed->value map identical
// across standard libraries; the determinism guarantees lean on that.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

  double uniform();   // [0, 1)
  double gaussian();  // N(0, 1)
  Cx cgaussian();     // complex, E|z|^2 = 1 (re/im independent N(0, 1/2))

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hwdd
