#ifndef TRANSIM_RNG_HPP
#define TRANSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace transim {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// mt19937_64 with hand-rolled variate transforms. std::*_distribution output
/// is implementation-defined, so distributions are derived from raw bits to
/// keep runs reproducible for a given seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for an indexed entity (host, flow, ...).
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(splitmix64(seed ^ splitmix64(index + 0x51ed2701)));
    }

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    double exponential(double mean) {
        return -mean * std::log(1.0 - uniform());
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace transim

#endif
