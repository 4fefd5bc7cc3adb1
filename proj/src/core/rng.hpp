#pragma once

#include <cstdint>

namespace mogen {

std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent stream seed from a base seed. Used to give each
// level / block / purpose its own generator so that resuming a run half way
// reproduces the remaining randomness bit for bit.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// xoshiro256** with hand-rolled distributions. The standard <random>
// distributions are implementation-defined, which would tie checkpoint
// reproducibility to a particular libstdc++; this keeps the byte stream
// under our control.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  double uniform();                          // [0, 1)
  double uniform(double lo, double hi);
  double normal();                           // standard normal, Box-Muller
  double normal(double mean, double stddev);
  std::uint64_t uniform_int(std::uint64_t n);  // [0, n), n >= 1
  bool bernoulli(double p);

 private:
  std::uint64_t s_[4];
};

}  // namespace mogen
