#pragma once

#include <cstdint>
#include <cmath>
#include <vector>

namespace tger {

/// Deterministic 64-bit generator (SplitMix64). Used everywhere randomness is
/// needed so that results are reproducible across platforms and standard
/// library implementations; std::uniform_*_distribution is not portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Derive an independent stream from (seed, a, b), e.g. per-snapshot
    /// streams keyed by (run seed, snapshot index).
    static Rng keyed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        Rng r(seed);
        r.state_ ^= mix(a + 0x9E3779B97F4A7C15ull);
        r.next();
        r.state_ ^= mix(b + 0xD1B54A32D192ED03ull);
        r.next();
        return r;
    }

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    /// Unbiased integer in [0, n) via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) return x % n;
        }
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586;
        has_cached_ = true;
        cached_ = r * std::sin(two_pi * u2);
        return r * std::cos(two_pi * u2);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace tger
