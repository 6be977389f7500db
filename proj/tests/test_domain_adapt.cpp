#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "posegen/domain_adapt.hpp"

using namespace posegen;

namespace {

Image random_image(int w, int h, uint64_t seed) {
    Image img(w, h);
    Rng rng(seed);
    for (uint8_t& b : img.pixels) b = uint8_t(rng.next_below(256));
    return img;
}

// naive full 2D convolution with clamp-to-edge borders, double precision
double conv2_at(const Image& img, int cx, int cy, int ch, const std::vector<double>& k) {
    int radius = int(k.size() / 2);
    double acc = 0;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            int x = std::clamp(cx + dx, 0, img.width - 1);
            int y = std::clamp(cy + dy, 0, img.height - 1);
            acc += k[dx + radius] * k[dy + radius] * img.at(x, y)[ch];
        }
    return acc;
}

}  // namespace

TEST_CASE("sigma = 0 is the identity") {
    Image img = random_image(64, 48, 1);
    CHECK(gaussian_blur(img, 0.0) == img);
    CHECK(gaussian_blur_serial(img, 0.0) == img);
}

TEST_CASE("kernel: radius ceil(3 sigma), unit sum, symmetric, peaked at center") {
    for (double sigma : {0.4, 1.0, 1.5, 2.7}) {
        std::vector<double> k = gaussian_kernel(sigma);
        CHECK(int(k.size()) == 2 * int(std::ceil(3 * sigma)) + 1);
        CHECK(std::abs(std::accumulate(k.begin(), k.end(), 0.0) - 1.0) < 1e-12);
        for (size_t i = 0; i < k.size(); ++i) {
            CHECK(k[i] == k[k.size() - 1 - i]);
            CHECK(k[i] <= k[k.size() / 2]);
        }
    }
}

TEST_CASE("blur of a constant image is unchanged within one level") {
    Image img(40, 40);
    for (size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = 137;
        img.pixels[i + 1] = 42;
        img.pixels[i + 2] = 250;
    }
    Image out = gaussian_blur(img, 2.0);
    for (size_t i = 0; i < out.pixels.size(); ++i)
        CHECK(std::abs(int(out.pixels[i]) - int(img.pixels[i])) <= 1);
}

TEST_CASE("separable blur matches a direct 2D convolution oracle") {
    Image img = random_image(24, 20, 7);
    double sigma = 1.3;
    std::vector<double> k = gaussian_kernel(sigma);
    Image out = gaussian_blur(img, sigma);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double expect = conv2_at(img, x, y, c, k);
                // one level of slack for the intermediate rounding
                CHECK(std::abs(double(out.at(x, y)[c]) - expect) <= 1.0);
            }
}

TEST_CASE("impulse response reproduces the kernel outer product") {
    Image img(21, 21);
    img.at(10, 10)[0] = 255;
    double sigma = 1.0;
    std::vector<double> k = gaussian_kernel(sigma);
    Image out = gaussian_blur(img, sigma);
    int radius = int(k.size() / 2);
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            double expect = 255.0 * k[dx + radius] * k[dy + radius];
            CHECK(std::abs(double(out.at(10 + dx, 10 + dy)[0]) - expect) <= 1.0);
        }
}

TEST_CASE("parallel and serial blurs agree byte-for-byte") {
    for (double sigma : {0.5, 1.5, 3.0}) {
        Image img = random_image(130, 97, uint64_t(sigma * 100));
        CHECK(gaussian_blur(img, sigma) == gaussian_blur_serial(img, sigma));
    }
}

TEST_CASE("std = 0 noise is the identity; same seed reproduces the same noise") {
    Image img = random_image(32, 32, 3);
    Rng r0(9);
    CHECK(add_white_noise(img, 0.0, r0) == img);
    Rng a(15), b(15), c(16);
    Image na = add_white_noise(img, 10.0, a);
    CHECK(na == add_white_noise(img, 10.0, b));
    CHECK_FALSE(na == add_white_noise(img, 10.0, c));
}

TEST_CASE("measured noise std is within 5% of the configured level") {
    // mid-gray keeps clamping negligible
    Image img(512, 512);
    for (uint8_t& b : img.pixels) b = 128;
    double configured = 10.0;
    Rng rng(2718);
    Image noisy = add_white_noise(img, configured, rng);
    double sum = 0, sum2 = 0;
    size_t n = noisy.pixels.size();
    for (size_t i = 0; i < n; ++i) {
        double d = double(noisy.pixels[i]) - 128.0;
        sum += d;
        sum2 += d * d;
    }
    double mean = sum / double(n);
    double stddev = std::sqrt(sum2 / double(n) - mean * mean);
    CHECK(std::abs(stddev - configured) / configured < 0.05);
    CHECK(std::abs(mean) < 0.1);
}

TEST_CASE("noise output stays clamped at the 8-bit rails") {
    Image img(16, 16);
    for (size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = (i % 2) ? 255 : 0;
    Rng rng(4);
    Image noisy = add_white_noise(img, 500.0, rng);
    bool low = false, high = false;
    for (uint8_t b : noisy.pixels) {
        if (b == 0) low = true;
        if (b == 255) high = true;
    }
    CHECK(low);
    CHECK(high);
}
