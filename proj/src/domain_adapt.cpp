#include "posegen/domain_adapt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace posegen {

std::vector<double> gaussian_kernel(double sigma_px) {
    if (sigma_px < 0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
    if (sigma_px == 0) return {1.0};
    int radius = int(std::ceil(3.0 * sigma_px));
    std::vector<double> k(2 * radius + 1);
    double denom = 2.0 * sigma_px * sigma_px;
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-double(i) * double(i) / denom);
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

namespace {

template <bool Parallel>
Image blur_impl(const Image& image, double sigma_px) {
    std::vector<double> kernel = gaussian_kernel(sigma_px);
    if (kernel.size() == 1) return image;
    int radius = int(kernel.size() / 2);
    const int w = image.width, h = image.height;

    std::vector<double> tmp(size_t(w) * h * 3);

    // horizontal pass, clamp-to-edge
    #pragma omp parallel for if (Parallel)
    for (long y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc[3] = {0, 0, 0};
            for (int i = -radius; i <= radius; ++i) {
                int sx = std::clamp(x + i, 0, w - 1);
                const uint8_t* px = image.at(sx, int(y));
                double kk = kernel[i + radius];
                acc[0] += kk * px[0];
                acc[1] += kk * px[1];
                acc[2] += kk * px[2];
            }
            double* out = &tmp[(size_t(y) * w + x) * 3];
            out[0] = acc[0]; out[1] = acc[1]; out[2] = acc[2];
        }
    }

    // vertical pass
    Image out(w, h);
    #pragma omp parallel for if (Parallel)
    for (long y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc[3] = {0, 0, 0};
            for (int i = -radius; i <= radius; ++i) {
                int sy = std::clamp(int(y) + i, 0, h - 1);
                const double* px = &tmp[(size_t(sy) * w + x) * 3];
                double kk = kernel[i + radius];
                acc[0] += kk * px[0];
                acc[1] += kk * px[1];
                acc[2] += kk * px[2];
            }
            uint8_t* dst = out.at(x, int(y));
            for (int c = 0; c < 3; ++c)
                dst[c] = uint8_t(std::clamp(acc[c] + 0.5, 0.0, 255.0));
        }
    }
    return out;
}

}  // namespace

Image gaussian_blur(const Image& image, double sigma_px) {
    return blur_impl<true>(image, sigma_px);
}

Image gaussian_blur_serial(const Image& image, double sigma_px) {
    return blur_impl<false>(image, sigma_px);
}

Image add_white_noise(const Image& image, double std_levels, Rng& rng) {
    if (std_levels < 0) throw std::invalid_argument("add_white_noise: std must be >= 0");
    if (std_levels == 0) return image;
    Image out = image;
    for (uint8_t& v : out.pixels) {
        double noisy = double(v) + std_levels * rng.next_gaussian();
        v = uint8_t(std::clamp(noisy + 0.5, 0.0, 255.0));
    }
    return out;
}

}  // namespace posegen
