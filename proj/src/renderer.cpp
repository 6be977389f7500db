#include "posegen/renderer.hpp"

#include <algorithm>
#include <cmath>

namespace posegen {

void EnvParams::validate() const {
    if (!(camera_radius > 0)) throw std::invalid_argument("env: camera radius must be > 0");
    if (!(camera_elevation > -kPi / 2 && camera_elevation < kPi / 2))
        throw std::invalid_argument("env: camera elevation must be in (-90, 90) degrees");
    if (image_width < 1 || image_height < 1)
        throw std::invalid_argument("env: image dimensions must be >= 1");
    if (light.intensity < 0 || light.ambient < 0 || light.intensity + light.ambient > 2)
        throw std::invalid_argument("env: light intensity/ambient out of range");
    if (!(focal_length_mm > 0) || !(sensor_width_mm > 0))
        throw std::invalid_argument("env: focal length and sensor width must be > 0");
}

Camera make_camera(const EnvParams& env, const Vec3& target) {
    env.validate();
    double ce = std::cos(env.camera_elevation), se = std::sin(env.camera_elevation);
    double ca = std::cos(env.camera_azimuth), sa = std::sin(env.camera_azimuth);
    Camera cam;
    cam.position = target + env.camera_radius * Vec3{ce * ca, ce * sa, se};
    Vec3 forward = normalized(target - cam.position);
    Vec3 up{0, 0, 1};
    cam.axis_z = forward;
    cam.axis_x = normalized(cross(forward, up));  // camera right
    cam.axis_y = cross(forward, cam.axis_x);      // camera down (image y grows downward)
    cam.f_pixels = env.focal_length_mm / env.sensor_width_mm * env.image_width;
    cam.cx = env.image_width * 0.5;
    cam.cy = env.image_height * 0.5;
    cam.width = env.image_width;
    cam.height = env.image_height;
    return cam;
}

Projection project(const Camera& camera, const Vec3& point) {
    Vec3 d = point - camera.position;
    Projection p;
    p.depth = dot(d, camera.axis_z);
    if (p.depth <= Camera::kNear) {
        p.behind = true;
        return p;
    }
    p.x = camera.cx + camera.f_pixels * dot(d, camera.axis_x) / p.depth;
    p.y = camera.cy + camera.f_pixels * dot(d, camera.axis_y) / p.depth;
    return p;
}

namespace {

struct CamVertex {
    Vec3 cam;    // camera-space position (x right, y down, z depth)
    Vec3 shade;  // shaded color in [0,1]
};

// Sutherland-Hodgman against the z = near plane.
size_t clip_near(const CamVertex in[3], CamVertex out[4]) {
    size_t n = 0;
    for (int i = 0; i < 3; ++i) {
        const CamVertex& a = in[i];
        const CamVertex& b = in[(i + 1) % 3];
        bool ain = a.cam.z > Camera::kNear;
        bool bin = b.cam.z > Camera::kNear;
        if (ain) out[n++] = a;
        if (ain != bin) {
            double t = (Camera::kNear - a.cam.z) / (b.cam.z - a.cam.z);
            CamVertex v;
            v.cam = a.cam + (b.cam - a.cam) * t;
            v.cam.z = Camera::kNear;  // guard against rounding
            v.shade = a.shade + (b.shade - a.shade) * t;
            out[n++] = v;
        }
    }
    return n;
}

struct ScreenVertex {
    double x, y, inv_z;
    Vec3 shade_over_z;
};

inline double edge(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Top-left fill rule: a pixel exactly on an edge belongs to the triangle
// whose edge is a top edge (horizontal, interior below) or a left edge.
inline bool top_left(double ax, double ay, double bx, double by) {
    double dx = bx - ax, dy = by - ay;
    return dy == 0 ? dx > 0 : dy < 0;
}

void raster_triangle(Framebuffer& fb, ScreenVertex v0, ScreenVertex v1, ScreenVertex v2) {
    double area = edge(v0.x, v0.y, v1.x, v1.y, v2.x, v2.y);
    if (area == 0) return;
    if (area < 0) {  // no backface culling: reorient so the interior is positive
        std::swap(v1, v2);
        area = -area;
    }
    int min_x = std::max(0, int(std::floor(std::min({v0.x, v1.x, v2.x}) - 0.5)));
    int max_x = std::min(fb.width - 1, int(std::ceil(std::max({v0.x, v1.x, v2.x}))));
    int min_y = std::max(0, int(std::floor(std::min({v0.y, v1.y, v2.y}) - 0.5)));
    int max_y = std::min(fb.height - 1, int(std::ceil(std::max({v0.y, v1.y, v2.y}))));
    if (min_x > max_x || min_y > max_y) return;

    bool tl0 = top_left(v1.x, v1.y, v2.x, v2.y);
    bool tl1 = top_left(v2.x, v2.y, v0.x, v0.y);
    bool tl2 = top_left(v0.x, v0.y, v1.x, v1.y);

    for (int py = min_y; py <= max_y; ++py) {
        double sy = py + 0.5;
        for (int px = min_x; px <= max_x; ++px) {
            double sx = px + 0.5;
            double w0 = edge(v1.x, v1.y, v2.x, v2.y, sx, sy);
            double w1 = edge(v2.x, v2.y, v0.x, v0.y, sx, sy);
            double w2 = edge(v0.x, v0.y, v1.x, v1.y, sx, sy);
            bool inside = (w0 > 0 || (w0 == 0 && tl0)) &&
                          (w1 > 0 || (w1 == 0 && tl1)) &&
                          (w2 > 0 || (w2 == 0 && tl2));
            if (!inside) continue;
            double l0 = w0 / area, l1 = w1 / area, l2 = w2 / area;
            double inv_z = l0 * v0.inv_z + l1 * v1.inv_z + l2 * v2.inv_z;
            float z = float(1.0 / inv_z);
            size_t i = fb.idx(px, py);
            if (z >= fb.depth[i]) continue;
            Vec3 c = (v0.shade_over_z * l0 + v1.shade_over_z * l1 + v2.shade_over_z * l2) / inv_z;
            fb.depth[i] = z;
            fb.mask[i] = 1;
            fb.color[i * 3 + 0] = uint8_t(std::clamp(c.x, 0.0, 1.0) * 255.0 + 0.5);
            fb.color[i * 3 + 1] = uint8_t(std::clamp(c.y, 0.0, 1.0) * 255.0 + 0.5);
            fb.color[i * 3 + 2] = uint8_t(std::clamp(c.z, 0.0, 1.0) * 255.0 + 0.5);
        }
    }
}

}  // namespace

Framebuffer rasterize(const Mesh& posed_mesh, const Camera& camera, const LightParams& light) {
    Framebuffer fb(camera.width, camera.height);
    if (posed_mesh.vertices.empty()) return fb;
    Mesh mesh = posed_mesh;
    ensure_render_attributes(mesh);

    // per-vertex camera-space position and two-sided Lambertian shade
    std::vector<CamVertex> verts(mesh.vertices.size());
    Vec3 l = normalized(light.direction);
    #pragma omp parallel for
    for (long i = 0; i < long(mesh.vertices.size()); ++i) {
        Vec3 d = mesh.vertices[i] - camera.position;
        verts[i].cam = {dot(d, camera.axis_x), dot(d, camera.axis_y), dot(d, camera.axis_z)};
        double lambert = light.ambient + light.intensity * std::abs(dot(mesh.normals[i], l));
        const Vec3& c = mesh.colors[i];
        verts[i].shade = {std::clamp(c.x * lambert, 0.0, 1.0),
                          std::clamp(c.y * lambert, 0.0, 1.0),
                          std::clamp(c.z * lambert, 0.0, 1.0)};
    }

    // single-writer framebuffer: triangles processed in order, serially
    for (const Face& f : mesh.faces) {
        CamVertex tri[3] = {verts[f[0]], verts[f[1]], verts[f[2]]};
        CamVertex clipped[4];
        size_t n = clip_near(tri, clipped);
        if (n < 3) continue;
        ScreenVertex sv[4];
        for (size_t k = 0; k < n; ++k) {
            double inv_z = 1.0 / clipped[k].cam.z;
            sv[k].x = camera.cx + camera.f_pixels * clipped[k].cam.x * inv_z;
            sv[k].y = camera.cy + camera.f_pixels * clipped[k].cam.y * inv_z;
            sv[k].inv_z = inv_z;
            sv[k].shade_over_z = clipped[k].shade * inv_z;
        }
        for (size_t k = 1; k + 1 < n; ++k)
            raster_triangle(fb, sv[0], sv[k], sv[k + 1]);
    }
    return fb;
}

Image composite(const Framebuffer& fb, const Image& background) {
    Image out = cover_resize(background, fb.width, fb.height);
    for (int y = 0; y < fb.height; ++y)
        for (int x = 0; x < fb.width; ++x) {
            size_t i = fb.idx(x, y);
            if (!fb.mask[i]) continue;
            uint8_t* px = out.at(x, y);
            px[0] = fb.color[i * 3 + 0];
            px[1] = fb.color[i * 3 + 1];
            px[2] = fb.color[i * 3 + 2];
        }
    return out;
}

const char* visibility_name(Visibility v) {
    switch (v) {
        case Visibility::Visible: return "visible";
        case Visibility::Occluded: return "occluded";
        case Visibility::OutOfFrame: return "out_of_frame";
    }
    return "?";
}

Visibility visibility_from_name(const std::string& s) {
    if (s == "visible") return Visibility::Visible;
    if (s == "occluded") return Visibility::Occluded;
    if (s == "out_of_frame") return Visibility::OutOfFrame;
    throw std::invalid_argument("unknown visibility label '" + s + "'");
}

std::array<JointAnnotation, kKeypointCount> annotate_joints(
    const std::array<Vec3, kKeypointCount>& keypoints, const Camera& camera,
    const Framebuffer& fb) {
    std::array<JointAnnotation, kKeypointCount> out;
    for (int k = 0; k < kKeypointCount; ++k) {
        Projection p = project(camera, keypoints[k]);
        JointAnnotation& a = out[k];
        a.x = p.x;
        a.y = p.y;
        a.depth = p.depth;
        if (p.behind || p.x < 0 || p.x >= fb.width || p.y < 0 || p.y >= fb.height) {
            a.visibility = Visibility::OutOfFrame;
            continue;
        }
        float buf = fb.depth[fb.idx(int(p.x), int(p.y))];
        a.visibility = (buf < p.depth - kOcclusionDelta) ? Visibility::Occluded : Visibility::Visible;
    }
    return out;
}

std::array<int, 4> mask_bbox(const Framebuffer& fb) {
    std::array<int, 4> box = {-1, -1, -1, -1};
    for (int y = 0; y < fb.height; ++y)
        for (int x = 0; x < fb.width; ++x)
            if (fb.mask[fb.idx(x, y)]) {
                if (box[0] < 0) { box = {x, y, x, y}; }
                else {
                    box[0] = std::min(box[0], x);
                    box[1] = std::min(box[1], y);
                    box[2] = std::max(box[2], x);
                    box[3] = std::max(box[3], y);
                }
            }
    return box;
}

}  // namespace posegen
