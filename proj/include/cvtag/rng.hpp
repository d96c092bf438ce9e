#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cvtag {

// Deterministic, seedable random stream with explicit Box-Muller so that the
// byte-level sample sequence is identical across platforms and library versions
// (std::normal_distribution is implementation-defined).
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the companion variate is cached.
    double gaussian01() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // u1 in (0, 1] keeps the log finite.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(t);
        have_cached_ = true;
        return r * std::cos(t);
    }

    // Independent child stream for shard `index`; depends only on (seed, index).
    RngStream derive(std::uint64_t index) const {
        return RngStream(splitmix64(seed_ + 0x9E3779B97F4A7C15ULL * (index + 1)));
    }

    std::uint64_t seed() const { return seed_; }

    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

} // namespace cvtag
