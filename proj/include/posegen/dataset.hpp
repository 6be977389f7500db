#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "posegen/bvh.hpp"
#include "posegen/renderer.hpp"
#include "posegen/sampler.hpp"
#include "posegen/skinning.hpp"

namespace posegen {

struct ScanEntry {
    std::string id;
    std::string mesh_path;
    std::string rig_path;
    std::string binding_path;
};

enum class PoseSourceType { Uniform, Grid, Mocap };
enum class MocapFrameMode { Random, Stride };

struct PoseSourceConfig {
    PoseSourceType type = PoseSourceType::Uniform;
    std::string constraints_path;
    // grid
    std::vector<std::string> grid_dofs;
    std::vector<int> grid_steps;
    // mocap
    std::string clip_path;
    std::string retarget_path;
    MocapFrameMode frame_mode = MocapFrameMode::Random;
    size_t stride = 1;
};

enum class AdaptationMode { None, Gauss, WhiteNoise };

struct AdaptationConfig {
    AdaptationMode mode = AdaptationMode::None;
    double sigma = 1.5;       // px, gauss
    double std_levels = 10;   // 8-bit levels, white noise
};

struct RangeD {
    double lo = 0, hi = 0;
};

struct GenerationConfig {
    std::vector<ScanEntry> scans;
    PoseSourceConfig pose_source;
    size_t images_per_scan = 2000;
    // camera draw ranges (radians internally)
    RangeD camera_radius{2.8, 3.4};
    RangeD camera_azimuth{-kPi, kPi};
    RangeD camera_elevation{0, 0};
    double focal_mm = 35, sensor_mm = 36;
    int width = 512, height = 512;
    // light draw ranges
    RangeD light_azimuth{-kPi, kPi};
    RangeD light_elevation{deg2rad(20), deg2rad(70)};
    RangeD light_intensity{0.5, 0.9};
    RangeD light_ambient{0.25, 0.45};
    std::string background_dir;
    AdaptationConfig adaptation;
    uint64_t master_seed = 0;
    std::string base_dir;  // directory paths are resolved against

    std::string resolve(const std::string& path) const;
};

/// Parse + validate a generation config; relative paths resolve against the
/// config file's directory and every referenced file must exist.
GenerationConfig load_generation_config(const std::string& path);
GenerationConfig parse_generation_config(const std::string& text, const std::string& base_dir);

/// Per-sample environment draw; everything needed to re-render the sample.
struct EnvDraw {
    double cam_radius = 3, cam_azimuth = 0, cam_elevation = 0;
    double light_azimuth = 0, light_elevation = deg2rad(45);
    double light_intensity = 0.7, light_ambient = 0.3;
    double focal_mm = 35, sensor_mm = 36;
    int width = 512, height = 512;
    std::string background_id;

    EnvParams to_env_params() const;
};

struct SampleRecord {
    uint64_t index = 0;
    std::string scan_id;
    uint64_t seed = 0;
    PoseVector pose;
    EnvDraw env;
    AdaptationConfig adaptation;
    std::array<JointAnnotation, kKeypointCount> keypoints{};
    std::array<int, 4> bbox = {-1, -1, -1, -1};
};

struct Manifest {
    int schema = 1;
    uint64_t master_seed = 0;
    std::string base_dir;
    std::string config_json;                      // resolved config snapshot
    std::map<std::string, std::string> checksums; // relative path -> fnv1a64 hex
    std::vector<std::string> backgrounds;         // sorted corpus file names
    std::vector<SampleRecord> records;            // ordered, ids dense per scan
};

/// Assets loaded once and shared read-only by all render workers.
struct ScanAssets {
    std::string id;
    Mesh mesh;
    Skeleton skeleton;
    VertexBinding binding;
};

struct RenderedSample {
    Image image;
    std::array<JointAnnotation, kKeypointCount> keypoints{};
    std::array<int, 4> bbox = {-1, -1, -1, -1};
};

/// Pure per-sample renderer: FK -> skin -> rasterize -> composite -> adapt.
/// Deterministic function of (assets, record core fields).
RenderedSample render_sample(const ScanAssets& scan, const Image& background,
                             const PoseVector& pose, const EnvDraw& env,
                             const AdaptationConfig& adaptation, uint64_t sample_seed);

/// Generate the dataset: images + per-image annotations under
/// out_dir/<scan_id>/<index>.png|.json, manifest.json written last.
/// jobs <= 0 means all available cores.
Manifest generate(const GenerationConfig& config, const std::string& out_dir, int jobs = 0);

/// Regenerate images bit-exactly from a manifest without re-sampling.
/// Asset checksums must match; mismatches abort with a diff report.
void replay(const std::string& manifest_path, const std::string& out_dir,
            const std::string& assets_dir_override = "", int jobs = 0);

Manifest load_manifest(const std::string& path);
std::string manifest_to_text(const Manifest& m);

std::string annotation_to_text(const SampleRecord& record);
SampleRecord annotation_from_text(const std::string& text);
void write_annotation(const std::string& path, const SampleRecord& record);
SampleRecord read_annotation(const std::string& path);

/// fnv1a64 of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::string& path);

/// Sorted image file names (.png/.jpg/.jpeg) in a directory.
std::vector<std::string> list_backgrounds(const std::string& dir);

}  // namespace posegen
