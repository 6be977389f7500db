#pragma once

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "posegen/image.hpp"
#include "posegen/mesh.hpp"
#include "posegen/rig.hpp"

namespace posegen {

struct LightParams {
    Vec3 direction{0, 0, -1};  // unit vector, direction the light travels
    double intensity = 0.7;    // [0, 1]
    double ambient = 0.3;      // [0, 1]
};

/// Environment parameters: spherical camera viewpoint around a look-at
/// target, 35mm-style intrinsics, lighting, and a background selection.
struct EnvParams {
    double camera_radius = 3.0;       // meters, > 0
    double camera_azimuth = 0.0;      // radians
    double camera_elevation = 0.0;    // radians, in (-pi/2, pi/2)
    double focal_length_mm = 35.0;
    double sensor_width_mm = 36.0;
    int image_width = 512;
    int image_height = 512;
    LightParams light;
    std::string background_id;  // file name within the background corpus

    void validate() const;
};

struct Camera {
    Vec3 position{};
    Vec3 axis_x{}, axis_y{}, axis_z{};  // right / down / view direction
    double f_pixels = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;

    static constexpr double kNear = 1e-4;  // meters
};

/// Spherical viewpoint: position = target + r*(cos(el)cos(az), cos(el)sin(az),
/// sin(el)) in the Z-up world; +Z resolves roll; image y grows downward.
Camera make_camera(const EnvParams& env, const Vec3& target);

struct Projection {
    double x = 0, y = 0;     // pixels
    double depth = 0;        // camera-space distance along the view axis
    bool behind = false;     // depth <= near plane
};

Projection project(const Camera& camera, const Vec3& point);

struct Framebuffer {
    int width = 0, height = 0;
    std::vector<uint8_t> color;   // RGB
    std::vector<float> depth;     // +inf where empty
    std::vector<uint8_t> mask;    // 1 = foreground

    Framebuffer() = default;
    Framebuffer(int w, int h)
        : width(w), height(h),
          color(size_t(w) * h * 3, 0),
          depth(size_t(w) * h, std::numeric_limits<float>::infinity()),
          mask(size_t(w) * h, 0) {}

    size_t idx(int x, int y) const { return size_t(y) * width + x; }
};

/// Z-buffered edge-function rasterization with the top-left fill rule,
/// perspective-correct vertex-color interpolation, two-sided Lambertian
/// shading, and near-plane clipping. Deterministic for identical inputs.
Framebuffer rasterize(const Mesh& posed_mesh, const Camera& camera, const LightParams& light);

/// Foreground (mask set) over a cover-scaled background.
Image composite(const Framebuffer& fb, const Image& background);

enum class Visibility { Visible, Occluded, OutOfFrame };
const char* visibility_name(Visibility v);
Visibility visibility_from_name(const std::string& s);

struct JointAnnotation {
    double x = 0, y = 0;   // pixels, sub-pixel precision
    double depth = 0;      // camera-space
    Visibility visibility = Visibility::OutOfFrame;
};

/// Occlusion epsilon: a keypoint deeper than the surface in front of it by
/// more than this is labeled occluded.
constexpr double kOcclusionDelta = 0.02;  // meters

std::array<JointAnnotation, kKeypointCount> annotate_joints(
    const std::array<Vec3, kKeypointCount>& keypoints, const Camera& camera,
    const Framebuffer& fb);

/// Pixel bounding box [min_x, min_y, max_x, max_y] of the mask, inclusive;
/// all -1 when the mask is empty.
std::array<int, 4> mask_bbox(const Framebuffer& fb);

}  // namespace posegen
