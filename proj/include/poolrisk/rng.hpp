#pragma once

#include <cmath>
#include <cstdint>

namespace poolrisk {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// xoshiro256++ with one independent stream per (seed, stream) pair, so
// path i of a simulation owns stream i and results do not depend on
// scheduling order.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream) {
    uint64_t mixer = seed + (stream + 1) * 0x9e3779b97f4a7c15ull;
    for (auto& word : s_) word = splitmix64(mixer);
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // uniform on (0, 1]; never returns 0 so logs are safe
  double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace poolrisk
