#include "posegen/demo_assets.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "posegen/image.hpp"
#include "posegen/mesh.hpp"
#include "posegen/sampler.hpp"

namespace posegen {

namespace fs = std::filesystem;

double capsule_radius(const std::string& bone_name) {
    if (bone_name == "T") return 0.019;
    if (bone_name == "H") return 0.018;
    if (bone_name == "LUA" || bone_name == "RUA") return 0.016;
    if (bone_name == "LLA" || bone_name == "RLA") return 0.015;
    if (bone_name == "LP" || bone_name == "RP") return 0.012;
    if (bone_name == "LUL" || bone_name == "RUL") return 0.017;
    if (bone_name == "LLL" || bone_name == "RLL") return 0.016;
    return 0.013;  // feet
}

namespace {

Vec3 limb_color(size_t bone_index) {
    // distinct flat colors, all exact multiples of 1/255 so PLY colors
    // round-trip through uchar
    static const int palette[14][3] = {
        {200, 120, 90},  {230, 190, 160}, {190, 60, 60},  {170, 40, 80},  {220, 120, 140},
        {60, 120, 190},  {40, 80, 170},   {120, 140, 220}, {70, 160, 70},  {40, 130, 110},
        {160, 200, 90},  {150, 100, 50},  {180, 140, 80},  {120, 90, 60},
    };
    const int* c = palette[bone_index % 14];
    return {c[0] / 255.0, c[1] / 255.0, c[2] / 255.0};
}

void orthonormal_basis(const Vec3& u, Vec3& e1, Vec3& e2) {
    Vec3 ref = std::abs(u.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    e1 = normalized(cross(u, ref));
    e2 = cross(u, e1);
}

}  // namespace

CapsulePerson capsule_person(const Skeleton& skeleton, int segments, int cap_rings) {
    CapsulePerson out;
    for (size_t bi = 0; bi < skeleton.bones.size(); ++bi) {
        const Bone& bone = skeleton.bones[bi];
        double r = capsule_radius(bone.name);
        Vec3 a = bone.head, b = bone.tail;
        Vec3 u = normalized(b - a);
        Vec3 e1, e2;
        orthonormal_basis(u, e1, e2);
        Vec3 color = limb_color(bi);

        uint32_t base = uint32_t(out.mesh.vertices.size());
        auto push = [&](const Vec3& p) {
            out.mesh.vertices.push_back(p);
            out.mesh.colors.push_back(color);
            out.source_bone.push_back(int(bi));
        };

        // ring sequence: head pole, head cap rings, tail cap rings, tail pole
        push(a - u * r);
        std::vector<uint32_t> ring_starts;
        auto push_ring = [&](const Vec3& center, double axial, double radial) {
            ring_starts.push_back(uint32_t(out.mesh.vertices.size()));
            for (int s = 0; s < segments; ++s) {
                double th = 2.0 * kPi * s / segments;
                push(center + u * axial + (e1 * std::cos(th) + e2 * std::sin(th)) * radial);
            }
        };
        for (int j = 1; j <= cap_rings; ++j) {
            double phi = (kPi / 2) * j / cap_rings;
            push_ring(a, -r * std::cos(phi), r * std::sin(phi));
        }
        for (int j = cap_rings; j >= 1; --j) {
            double phi = (kPi / 2) * j / cap_rings;
            push_ring(b, r * std::cos(phi), r * std::sin(phi));
        }
        push(b + u * r);
        uint32_t tail_pole = uint32_t(out.mesh.vertices.size() - 1);

        // head pole fan
        for (int s = 0; s < segments; ++s)
            out.mesh.faces.push_back({base, ring_starts[0] + uint32_t((s + 1) % segments),
                                      ring_starts[0] + uint32_t(s)});
        // ring bands
        for (size_t j = 0; j + 1 < ring_starts.size(); ++j) {
            uint32_t r0 = ring_starts[j], r1 = ring_starts[j + 1];
            for (int s = 0; s < segments; ++s) {
                uint32_t s1 = uint32_t((s + 1) % segments);
                out.mesh.faces.push_back({r0 + uint32_t(s), r0 + s1, r1 + s1});
                out.mesh.faces.push_back({r0 + uint32_t(s), r1 + s1, r1 + uint32_t(s)});
            }
        }
        // tail pole fan
        uint32_t last = ring_starts.back();
        for (int s = 0; s < segments; ++s)
            out.mesh.faces.push_back({tail_pole, last + uint32_t(s),
                                      last + uint32_t((s + 1) % segments)});
    }
    recompute_normals(out.mesh);
    out.mesh.validate();
    return out;
}

namespace {

Image procedural_background(int variant, int w, int h) {
    Image img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            uint8_t* px = img.at(x, y);
            switch (variant % 4) {
                case 0: {  // vertical gradient
                    px[0] = uint8_t(40 + 150 * y / h);
                    px[1] = uint8_t(60 + 120 * y / h);
                    px[2] = uint8_t(90 + 140 * y / h);
                    break;
                }
                case 1: {  // checkerboard
                    bool on = ((x / 24) + (y / 24)) % 2 == 0;
                    px[0] = on ? 180 : 70;
                    px[1] = on ? 160 : 80;
                    px[2] = on ? 140 : 95;
                    break;
                }
                case 2: {  // concentric rings
                    double d = std::hypot(x - w / 2.0, y - h / 2.0);
                    int band = int(d / 18) % 2;
                    px[0] = band ? 120 : 200;
                    px[1] = band ? 140 : 170;
                    px[2] = band ? 90 : 130;
                    break;
                }
                default: {  // diagonal stripes
                    int band = ((x + y) / 20) % 3;
                    px[0] = uint8_t(80 + 50 * band);
                    px[1] = uint8_t(100 + 40 * band);
                    px[2] = uint8_t(60 + 60 * band);
                    break;
                }
            }
        }
    return img;
}

std::string demo_config_json() {
    return R"({
  "scans": [
    {"id": "capsule", "mesh": "capsule.ply", "rig": "rig.json", "binding": "capsule.binding"}
  ],
  "pose_source": {"type": "uniform", "constraints": "constraints.json"},
  "images_per_scan": 25,
  "camera": {
    "radius": [2.8, 3.4],
    "azimuth_deg": [-60, 60],
    "elevation_deg": [-5, 25],
    "focal_mm": 35, "sensor_mm": 36,
    "width": 256, "height": 256
  },
  "light": {
    "azimuth_deg": [-180, 180],
    "elevation_deg": [20, 70],
    "intensity": [0.5, 0.9],
    "ambient": [0.25, 0.45]
  },
  "background_dir": "backgrounds",
  "adaptation": {"mode": "none", "sigma": 1.5, "std": 10},
  "seed": 42
})";
}

}  // namespace

void emit_demo_assets(const std::string& dir) {
    fs::create_directories(dir);
    fs::create_directories(fs::path(dir) / "backgrounds");

    Skeleton rig = canonical_rig();
    CapsulePerson person = capsule_person(rig);

    {
        std::ofstream out(fs::path(dir) / "capsule.ply", std::ios::binary);
        out << mesh_io::write_ply(person.mesh, mesh_io::PlyMode::Binary);
    }
    {
        std::ofstream out(fs::path(dir) / "rig.json", std::ios::binary);
        out << canonical_rig_json();
    }
    {
        std::ofstream out(fs::path(dir) / "constraints.json", std::ios::binary);
        out << default_constraints_json();
    }
    {
        // pre-labeled binding straight from the generating bones
        VertexBinding binding;
        binding.mode = VertexBinding::Mode::Rigid;
        binding.labels = person.source_bone;
        save_binding((fs::path(dir) / "capsule.binding").string(), binding, rig);
    }
    for (int i = 0; i < 4; ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "bg_%02d.png", i);
        save_png((fs::path(dir) / "backgrounds" / name).string(),
                 procedural_background(i, 320, 240));
    }
    {
        std::ofstream out(fs::path(dir) / "config.json", std::ios::binary);
        out << demo_config_json();
    }
}

}  // namespace posegen
