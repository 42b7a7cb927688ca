#pragma once

#include <cstdint>

namespace geopulse::synth {

// xorshift64* with a splitmix64-seeded state. The recurrence is part of the
// corpus format: a port that reproduces it reproduces corpora bit-exactly.
//
//   seed:  z = seed + 0x9E3779B97F4A7C15
//          z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//          z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//          state = z ^ (z >> 31)            (0 is replaced by 0x9E3779B97F4A7C15)
//   next:  state ^= state >> 12
//          state ^= state << 25
//          state ^= state >> 27
//          return state * 0x2545F4914F6CDD1D
//
// Derived draws:
//   uniform()         = (next() >> 11) * 2^-53            in [0, 1)
//   uniform_int(n)    = floor(uniform() * n)
//   bernoulli(p)      = uniform() < p
//   normal()          = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)  (two uniforms)
//   poisson(l), l<=30 = Knuth product method; l>30: max(0, round(l + sqrt(l) normal()))
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);

  std::uint64_t next();
  double uniform();
  std::uint64_t uniform_int(std::uint64_t n);
  bool bernoulli(double p);
  double normal();
  std::uint64_t poisson(double lambda);

 private:
  std::uint64_t state_;
};

}  // namespace geopulse::synth
