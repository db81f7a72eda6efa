#include "hwdd/rng.hpp"

#include <cmath>
#include <numbers>

namespace hwdd {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x517cc1b727220a95ULL));
}

double Prng::uniform() {
  // 53-bit mantissa fill; uniform in [0, 1)
  return double(gen_() >> 11) * 0x1.0p-53;
}

double Prng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Cx Prng::cgaussian() {
  double re = gaussian();
  double im = gaussian();
  return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
}

}  // namespace hwdd
