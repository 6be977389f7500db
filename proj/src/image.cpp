#include "posegen/image.hpp"

#include <algorithm>
#include <stdexcept>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/core.hpp>

namespace posegen {

Image load_image(const std::string& path) {
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty()) throw std::runtime_error("cannot decode image file: " + path);
    Image img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            uint8_t* px = img.at(x, y);
            px[0] = row[x][2];
            px[1] = row[x][1];
            px[2] = row[x][0];
        }
    }
    return img;
}

void save_png(const std::string& path, const Image& image) {
    cv::Mat bgr(image.height, image.width, CV_8UC3);
    for (int y = 0; y < image.height; ++y) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width; ++x) {
            const uint8_t* px = image.at(x, y);
            row[x] = cv::Vec3b(px[2], px[1], px[0]);
        }
    }
    std::vector<int> params = {cv::IMWRITE_PNG_COMPRESSION, 6,
                               cv::IMWRITE_PNG_STRATEGY, cv::IMWRITE_PNG_STRATEGY_DEFAULT};
    if (!cv::imwrite(path, bgr, params))
        throw std::runtime_error("cannot write PNG file: " + path);
}

Image cover_resize(const Image& src, int width, int height) {
    if (src.width <= 0 || src.height <= 0)
        throw std::invalid_argument("cover_resize: empty source image");
    Image out(width, height);
    double scale = std::max(double(width) / src.width, double(height) / src.height);
    double crop_w = width / scale, crop_h = height / scale;
    double x0 = (src.width - crop_w) * 0.5, y0 = (src.height - crop_h) * 0.5;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            int sx = std::clamp(int(x0 + (x + 0.5) / scale), 0, src.width - 1);
            int sy = std::clamp(int(y0 + (y + 0.5) / scale), 0, src.height - 1);
            const uint8_t* s = src.at(sx, sy);
            uint8_t* d = out.at(x, y);
            d[0] = s[0]; d[1] = s[1]; d[2] = s[2];
        }
    }
    return out;
}

}  // namespace posegen
