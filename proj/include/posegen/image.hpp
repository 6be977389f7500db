#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace posegen {

/// 8-bit RGB image, row-major, tightly packed.
struct Image {
    int width = 0, height = 0;
    std::vector<uint8_t> pixels;  // width*height*3

    Image() = default;
    Image(int w, int h) : width(w), height(h), pixels(size_t(w) * h * 3, 0) {}

    uint8_t* at(int x, int y) { return pixels.data() + (size_t(y) * width + x) * 3; }
    const uint8_t* at(int x, int y) const { return pixels.data() + (size_t(y) * width + x) * 3; }

    bool operator==(const Image& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }
};

/// PNG/JPEG decode (any OpenCV-supported format). Throws on unreadable files.
Image load_image(const std::string& path);

/// PNG encode with fixed settings so identical pixels give identical bytes.
void save_png(const std::string& path, const Image& image);

/// Scale-to-cover then center-crop to (width, height); nearest-neighbor,
/// fully deterministic.
Image cover_resize(const Image& src, int width, int height);

}  // namespace posegen
