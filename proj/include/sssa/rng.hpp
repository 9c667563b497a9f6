#pragma once

#include <cmath>
#include <cstdint>

namespace sssa {

// splitmix64 finalizer (Vigna, public domain reference implementation).
// Used both to expand seeds into xoshiro state and to derive independent
// child seeds from a (seed, key) pair.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic child-seed derivation: derive(s, k) folds the key into the
// seed through two splitmix64 rounds. Collisions across distinct keys are
// as unlikely as 64-bit hash collisions.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) {
  return splitmix64_mix(seed ^ splitmix64_mix(key + 0x632be59bd9b4e019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k1,
                                 std::uint64_t k2) {
  return derive_seed(derive_seed(seed, k1), k2);
}

// xoshiro256** 1.0 (Blackman & Vigna, public domain reference
// implementation). State is seeded from splitmix64 as the authors recommend.
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& word : state_) {
      z += 0x9e3779b97f4a7c15ULL;
      std::uint64_t t = z;
      t = (t ^ (t >> 30)) * 0xbf58476d1ce4e5b9ULL;
      t = (t ^ (t >> 27)) * 0x94d049bb133111ebULL;
      word = t ^ (t >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Discrete uniform on {1, ..., n}. Bias is < n / 2^53, negligible for the
  // atom-count ranges used here.
  int uniform_index(int n) {
    int k = 1 + static_cast<int>(next_double() * n);
    return k > n ? n : k;
  }

  // Standard normal via the Marsaglia polar method; one spare deviate is
  // cached so draws come in deterministic stream order.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Name recorded in dataset manifests so files can state how they were made.
inline const char* rng_algorithm_name() {
  return "xoshiro256** 1.0 + splitmix64 seed derivation";
}

}  // namespace sssa
