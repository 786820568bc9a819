#ifndef KINLNA_RNG_HPP
#define KINLNA_RNG_HPP

#include <cmath>
#include <cstdint>

namespace kinlna {

/// Seedable counter-free PRNG with a fixed, documented algorithm so that
/// trajectories are bit-reproducible: xoshiro256** for the raw stream,
/// seeded through splitmix64; uniforms take the top 53 bits; normals use
/// the Box-Muller transform; exponentials use inversion.
///
/// Replicate substreams are derived as substream(seed, r), which mixes the
/// replicate index into the seed with splitmix64 before seeding, so distinct
/// replicates use statistically independent streams.
class Rng {
public:
  explicit Rng(uint64_t seed) {
    uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  static Rng substream(uint64_t seed, uint64_t index) {
    uint64_t s = seed;
    uint64_t a = splitmix64(s);
    uint64_t t = index + 0x9e3779b97f4a7c15ULL;
    return Rng(a ^ splitmix64(t));
  }

  uint64_t next_u64() {
    uint64_t* s = state_;
    uint64_t result = rotl(s[1] * 5, 7) * 9;
    uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return 1.0 - uniform(); }

  /// Exponential with the given rate, by inversion.
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  /// Standard normal via Box-Muller; generates pairs and caches the spare.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  static uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  uint64_t state_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

} // namespace kinlna

#endif
