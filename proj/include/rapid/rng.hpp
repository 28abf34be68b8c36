#pragma once

#include <cstdint>

namespace rapid {

// splitmix64, Sebastiano Vigna, public domain (https://prng.di.unimi.it/splitmix64.c).
// Used everywhere seeded determinism matters; results are identical across
// platforms, unlike std::hash or libstdc++ distribution internals.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

  private:
    std::uint64_t state_;
};

// Stateless mix of several stream coordinates into one seed. Order matters.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                              std::uint64_t d = 0) {
    std::uint64_t s = a;
    splitmix64(s);
    s ^= 0x632be59bd9b4e019ULL + b;
    splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ULL * (c + 1);
    splitmix64(s);
    s ^= d;
    return splitmix64(s);
}

}  // namespace rapid
