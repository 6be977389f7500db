#pragma once

#include "posegen/image.hpp"
#include "posegen/rng.hpp"

namespace posegen {

/// Separable Gaussian blur: kernel radius ceil(3*sigma), coefficients
/// renormalized to sum 1, clamp-to-edge borders, per channel. sigma = 0 is
/// the identity. OpenMP-parallel across rows/columns.
Image gaussian_blur(const Image& image, double sigma_px);

/// Serial reference implementation with identical semantics; kept for tests
/// and the benchmark target.
Image gaussian_blur_serial(const Image& image, double sigma_px);

/// The blur kernel (radius ceil(3*sigma), normalized). Exposed for tests.
std::vector<double> gaussian_kernel(double sigma_px);

/// Per-pixel per-channel i.i.d. zero-mean Gaussian noise in 8-bit levels,
/// clamped to [0, 255]. Deterministic under the seed.
Image add_white_noise(const Image& image, double std_levels, Rng& rng);

}  // namespace posegen
