#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace posegen {

/// splitmix64 finalizer; used both as a stream generator and as a stable
/// 64-bit mixing hash for seed derivation.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Deterministic counter-based generator (splitmix64 stream). The same seed
/// always yields the same sequence regardless of platform or stdlib.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, n). n must be > 0.
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (one value per call; no caching so the
    /// draw count stays predictable).
    double next_gaussian() {
        double u1 = next_double(), u2 = next_double();
        if (u1 <= 0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    uint64_t state_;
};

/// Stable per-sample seed: hash of (master seed, scan id, sample index).
inline uint64_t derive_sample_seed(uint64_t master, std::string_view scan_id, uint64_t index) {
    return mix64(mix64(master ^ fnv1a64(scan_id)) + index);
}

}  // namespace posegen
