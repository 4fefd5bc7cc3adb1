#include "core/rng.hpp"

#include <cmath>

#include "core/common.hpp"

namespace mogen {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t s = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

Rng::Rng(std::uint64_t seed) {
  // Seed the four lanes via splitmix64 as recommended for xoshiro.
  for (auto& lane : s_) lane = splitmix64(seed);
}

static inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  // Box-Muller without the cached spare so that one call consumes a fixed
  // number of raw draws.
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double Rng::normal(double mean, double stddev) {
  return mean + stddev * normal();
}

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  require(n >= 1, "uniform_int: n must be >= 1");
  // Multiply-shift; the modulo bias is < 2^-64 * n, irrelevant for our n.
  return static_cast<std::uint64_t>(
      (static_cast<__uint128_t>(next()) * static_cast<__uint128_t>(n)) >> 64);
}

bool Rng::bernoulli(double p) {
  return uniform() < p;
}

}  // namespace mogen
