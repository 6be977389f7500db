#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace posegen {

/// Shortest decimal string that round-trips to the given float. Used by the
/// manifest writer to keep per-sample records compact and byte-stable.
inline std::string shortest_float(float v) {
    char buf[64];
    for (int prec = 1; prec <= 9; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, double(v));
        if (std::strtof(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.9g", double(v));
    return buf;
}

/// Round a double to the nearest float and widen back. All sampled dataset
/// parameters pass through this so manifests can store float32 precision
/// while regeneration stays bit-exact.
/// The volatile round-trip is load-bearing: GCC 11's SLP vectorizer at -O3
/// elides adjacent double->float->double casts, which silently breaks the
/// float32 quantization this function exists to provide.
inline double quantize_f32(double v) {
    volatile float f = float(v);
    return double(f);
}

}  // namespace posegen
