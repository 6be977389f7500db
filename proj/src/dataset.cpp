#include "posegen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "posegen/domain_adapt.hpp"
#include "posegen/errors.hpp"
#include "posegen/floatfmt.hpp"

namespace posegen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr uint64_t kNoiseSeedSalt = 0x6e6f697365ULL;  // noise stream decoupled from draws

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << data;
}

const char* adaptation_mode_name(AdaptationMode m) {
    switch (m) {
        case AdaptationMode::None: return "none";
        case AdaptationMode::Gauss: return "gauss";
        case AdaptationMode::WhiteNoise: return "white_noise";
    }
    return "?";
}

AdaptationMode adaptation_mode_from(const std::string& s) {
    if (s == "none") return AdaptationMode::None;
    if (s == "gauss") return AdaptationMode::Gauss;
    if (s == "white_noise") return AdaptationMode::WhiteNoise;
    throw ParseError("config: unknown adaptation mode '" + s + "'");
}

RangeD range_from(const json& j, const std::string& name, bool degrees) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("config: '" + name + "' must be [low, high]");
    RangeD r{j[0].get<double>(), j[1].get<double>()};
    if (degrees) { r.lo = deg2rad(r.lo); r.hi = deg2rad(r.hi); }
    if (r.lo > r.hi) throw ParseError("config: inverted range for " + name);
    return r;
}

json range_to(const RangeD& r, bool degrees) {
    return degrees ? json{rad2deg(r.lo), rad2deg(r.hi)} : json{r.lo, r.hi};
}

}  // namespace

std::string GenerationConfig::resolve(const std::string& path) const {
    fs::path p(path);
    if (p.is_absolute() || base_dir.empty()) return path;
    return (fs::path(base_dir) / p).string();
}

GenerationConfig parse_generation_config(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }
    GenerationConfig cfg;
    cfg.base_dir = base_dir;

    if (!doc.contains("scans") || !doc["scans"].is_array() || doc["scans"].empty())
        throw ParseError("config: 'scans' must be a non-empty array");
    for (const json& js : doc["scans"]) {
        ScanEntry e;
        e.id = js.at("id").get<std::string>();
        e.mesh_path = js.at("mesh").get<std::string>();
        e.rig_path = js.at("rig").get<std::string>();
        e.binding_path = js.at("binding").get<std::string>();
        cfg.scans.push_back(e);
    }

    const json& ps = doc.at("pose_source");
    std::string type = ps.at("type").get<std::string>();
    cfg.pose_source.constraints_path = ps.at("constraints").get<std::string>();
    if (type == "uniform") {
        cfg.pose_source.type = PoseSourceType::Uniform;
    } else if (type == "grid") {
        cfg.pose_source.type = PoseSourceType::Grid;
        for (const json& jd : ps.at("dofs")) cfg.pose_source.grid_dofs.push_back(jd.get<std::string>());
        for (const json& js : ps.at("steps")) cfg.pose_source.grid_steps.push_back(js.get<int>());
    } else if (type == "mocap") {
        cfg.pose_source.type = PoseSourceType::Mocap;
        cfg.pose_source.clip_path = ps.at("clip").get<std::string>();
        cfg.pose_source.retarget_path = ps.at("retarget").get<std::string>();
        if (ps.contains("frame_mode")) {
            std::string fm = ps["frame_mode"].get<std::string>();
            if (fm == "random") cfg.pose_source.frame_mode = MocapFrameMode::Random;
            else if (fm == "stride") cfg.pose_source.frame_mode = MocapFrameMode::Stride;
            else throw ParseError("config: unknown frame_mode '" + fm + "'");
        }
        if (ps.contains("stride")) cfg.pose_source.stride = ps["stride"].get<size_t>();
        if (cfg.pose_source.stride == 0) throw ParseError("config: stride must be >= 1");
    } else {
        throw ParseError("config: unknown pose source type '" + type + "'");
    }

    if (doc.contains("images_per_scan")) cfg.images_per_scan = doc["images_per_scan"].get<size_t>();
    if (cfg.images_per_scan < 1) throw ParseError("config: images_per_scan must be >= 1");

    if (doc.contains("camera")) {
        const json& jc = doc["camera"];
        if (jc.contains("radius")) cfg.camera_radius = range_from(jc["radius"], "camera.radius", false);
        if (jc.contains("azimuth_deg")) cfg.camera_azimuth = range_from(jc["azimuth_deg"], "camera.azimuth_deg", true);
        if (jc.contains("elevation_deg")) cfg.camera_elevation = range_from(jc["elevation_deg"], "camera.elevation_deg", true);
        if (jc.contains("focal_mm")) cfg.focal_mm = jc["focal_mm"].get<double>();
        if (jc.contains("sensor_mm")) cfg.sensor_mm = jc["sensor_mm"].get<double>();
        if (jc.contains("width")) cfg.width = jc["width"].get<int>();
        if (jc.contains("height")) cfg.height = jc["height"].get<int>();
    }
    if (cfg.camera_radius.lo <= 0) throw ParseError("config: camera radius must be > 0");
    if (doc.contains("light")) {
        const json& jl = doc["light"];
        if (jl.contains("azimuth_deg")) cfg.light_azimuth = range_from(jl["azimuth_deg"], "light.azimuth_deg", true);
        if (jl.contains("elevation_deg")) cfg.light_elevation = range_from(jl["elevation_deg"], "light.elevation_deg", true);
        if (jl.contains("intensity")) cfg.light_intensity = range_from(jl["intensity"], "light.intensity", false);
        if (jl.contains("ambient")) cfg.light_ambient = range_from(jl["ambient"], "light.ambient", false);
    }
    cfg.background_dir = doc.at("background_dir").get<std::string>();
    if (doc.contains("adaptation")) {
        const json& ja = doc["adaptation"];
        cfg.adaptation.mode = adaptation_mode_from(ja.at("mode").get<std::string>());
        if (ja.contains("sigma")) cfg.adaptation.sigma = ja["sigma"].get<double>();
        if (ja.contains("std")) cfg.adaptation.std_levels = ja["std"].get<double>();
        if (cfg.adaptation.sigma < 0 || cfg.adaptation.std_levels < 0)
            throw ParseError("config: adaptation parameters must be >= 0");
    }
    if (doc.contains("seed")) cfg.master_seed = doc["seed"].get<uint64_t>();
    return cfg;
}

namespace {

void check_config_files(const GenerationConfig& cfg) {
    auto require = [&](const std::string& rel, const char* what) {
        std::string p = cfg.resolve(rel);
        if (!fs::exists(p))
            throw std::runtime_error(std::string(what) + " file not found: " + p);
    };
    for (const ScanEntry& s : cfg.scans) {
        require(s.mesh_path, "mesh");
        require(s.rig_path, "rig spec");
        require(s.binding_path, "binding");
    }
    require(cfg.pose_source.constraints_path, "constraints");
    if (cfg.pose_source.type == PoseSourceType::Mocap) {
        require(cfg.pose_source.clip_path, "mocap clip");
        require(cfg.pose_source.retarget_path, "retarget map");
    }
    if (!fs::is_directory(cfg.resolve(cfg.background_dir)))
        throw std::runtime_error("background directory not found: " + cfg.resolve(cfg.background_dir));
}

json config_to_json(const GenerationConfig& cfg) {
    json doc;
    for (const ScanEntry& s : cfg.scans)
        doc["scans"].push_back({{"id", s.id}, {"mesh", s.mesh_path}, {"rig", s.rig_path}, {"binding", s.binding_path}});
    json ps;
    ps["constraints"] = cfg.pose_source.constraints_path;
    switch (cfg.pose_source.type) {
        case PoseSourceType::Uniform: ps["type"] = "uniform"; break;
        case PoseSourceType::Grid:
            ps["type"] = "grid";
            ps["dofs"] = cfg.pose_source.grid_dofs;
            ps["steps"] = cfg.pose_source.grid_steps;
            break;
        case PoseSourceType::Mocap:
            ps["type"] = "mocap";
            ps["clip"] = cfg.pose_source.clip_path;
            ps["retarget"] = cfg.pose_source.retarget_path;
            ps["frame_mode"] = cfg.pose_source.frame_mode == MocapFrameMode::Random ? "random" : "stride";
            ps["stride"] = cfg.pose_source.stride;
            break;
    }
    doc["pose_source"] = ps;
    doc["images_per_scan"] = cfg.images_per_scan;
    doc["camera"] = {{"radius", range_to(cfg.camera_radius, false)},
                     {"azimuth_deg", range_to(cfg.camera_azimuth, true)},
                     {"elevation_deg", range_to(cfg.camera_elevation, true)},
                     {"focal_mm", cfg.focal_mm}, {"sensor_mm", cfg.sensor_mm},
                     {"width", cfg.width}, {"height", cfg.height}};
    doc["light"] = {{"azimuth_deg", range_to(cfg.light_azimuth, true)},
                    {"elevation_deg", range_to(cfg.light_elevation, true)},
                    {"intensity", range_to(cfg.light_intensity, false)},
                    {"ambient", range_to(cfg.light_ambient, false)}};
    doc["background_dir"] = cfg.background_dir;
    doc["adaptation"] = {{"mode", adaptation_mode_name(cfg.adaptation.mode)},
                         {"sigma", cfg.adaptation.sigma}, {"std", cfg.adaptation.std_levels}};
    doc["seed"] = cfg.master_seed;
    return doc;
}

}  // namespace

GenerationConfig load_generation_config(const std::string& path) {
    GenerationConfig cfg =
        parse_generation_config(read_file(path), fs::path(path).parent_path().string());
    check_config_files(cfg);
    return cfg;
}

EnvParams EnvDraw::to_env_params() const {
    EnvParams env;
    env.camera_radius = cam_radius;
    env.camera_azimuth = cam_azimuth;
    env.camera_elevation = cam_elevation;
    env.focal_length_mm = focal_mm;
    env.sensor_width_mm = sensor_mm;
    env.image_width = width;
    env.image_height = height;
    double ce = std::cos(light_elevation), se = std::sin(light_elevation);
    // light travels from its spherical position toward the scene
    env.light.direction = -Vec3{ce * std::cos(light_azimuth), ce * std::sin(light_azimuth), se};
    env.light.intensity = light_intensity;
    env.light.ambient = light_ambient;
    env.background_id = background_id;
    return env;
}

std::string file_checksum(const std::string& path) {
    uint64_t h = fnv1a64(read_file(path));
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

std::vector<std::string> list_backgrounds(const std::string& dir) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
            names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

RenderedSample render_sample(const ScanAssets& scan, const Image& background,
                             const PoseVector& pose, const EnvDraw& env,
                             const AdaptationConfig& adaptation, uint64_t sample_seed) {
    BoneTransforms transforms = forward_kinematics(scan.skeleton, pose);
    Mesh posed = apply_pose(scan.mesh, scan.binding, transforms);

    // look-at target: posed root joint position
    int root = -1;
    for (size_t i = 0; i < scan.skeleton.bones.size(); ++i)
        if (scan.skeleton.bones[i].parent < 0) root = int(i);
    Vec3 target = transforms.world[root].apply({0, 0, 0});

    EnvParams env_params = env.to_env_params();
    Camera camera = make_camera(env_params, target);
    Framebuffer fb = rasterize(posed, camera, env_params.light);

    RenderedSample out;
    out.image = composite(fb, background);
    switch (adaptation.mode) {
        case AdaptationMode::None: break;
        case AdaptationMode::Gauss:
            out.image = gaussian_blur(out.image, adaptation.sigma);
            break;
        case AdaptationMode::WhiteNoise: {
            Rng noise_rng(mix64(sample_seed ^ kNoiseSeedSalt));
            out.image = add_white_noise(out.image, adaptation.std_levels, noise_rng);
            break;
        }
    }
    out.keypoints = annotate_joints(joint_world_positions(scan.skeleton, transforms), camera, fb);
    out.bbox = mask_bbox(fb);
    return out;
}

namespace {

struct PreparedPoseSource {
    ConstraintMatrix constraints;
    std::vector<PoseVector> grid;  // grid mode
    MocapClip clip;                // mocap mode
    RetargetMap retarget_map;
};

PreparedPoseSource prepare_pose_source(const GenerationConfig& cfg, const Skeleton& skeleton) {
    PreparedPoseSource out;
    out.constraints = load_constraints(read_file(cfg.resolve(cfg.pose_source.constraints_path)), skeleton);
    if (cfg.pose_source.type == PoseSourceType::Grid) {
        std::vector<int> dofs;
        for (const std::string& name : cfg.pose_source.grid_dofs) {
            int idx = skeleton.dof_index(name);
            if (idx < 0) throw std::runtime_error("config: unknown grid DOF name '" + name + "'");
            dofs.push_back(idx);
        }
        out.grid = sample_grid(out.constraints, dofs, cfg.pose_source.grid_steps,
                               PoseVector::zeros(skeleton));
        // manifests store float32; quantize up front so replay is bit-exact
        for (PoseVector& p : out.grid)
            for (double& t : p.theta) t = quantize_f32(t);
    } else if (cfg.pose_source.type == PoseSourceType::Mocap) {
        out.clip = parse_bvh(read_file(cfg.resolve(cfg.pose_source.clip_path)));
        if (out.clip.frame_count == 0) throw std::runtime_error("mocap clip has no frames");
        out.retarget_map =
            load_retarget_map(read_file(cfg.resolve(cfg.pose_source.retarget_path)), skeleton);
    }
    return out;
}

PoseVector draw_pose(const GenerationConfig& cfg, const PreparedPoseSource& src, size_t index,
                     Rng& rng) {
    switch (cfg.pose_source.type) {
        case PoseSourceType::Uniform:
            return sample_uniform(src.constraints, rng);
        case PoseSourceType::Grid:
            return src.grid[index % src.grid.size()];
        case PoseSourceType::Mocap: {
            size_t frame = cfg.pose_source.frame_mode == MocapFrameMode::Random
                               ? size_t(rng.next_below(src.clip.frame_count))
                               : (index * cfg.pose_source.stride) % src.clip.frame_count;
            return retarget_frame(src.clip, src.retarget_map, src.constraints, frame);
        }
    }
    throw std::logic_error("unreachable pose source type");
}

EnvDraw draw_env(const GenerationConfig& cfg, const std::vector<std::string>& backgrounds, Rng& rng) {
    EnvDraw env;
    env.cam_radius = quantize_f32(rng.uniform(cfg.camera_radius.lo, cfg.camera_radius.hi));
    env.cam_azimuth = quantize_f32(rng.uniform(cfg.camera_azimuth.lo, cfg.camera_azimuth.hi));
    env.cam_elevation = quantize_f32(rng.uniform(cfg.camera_elevation.lo, cfg.camera_elevation.hi));
    env.light_azimuth = quantize_f32(rng.uniform(cfg.light_azimuth.lo, cfg.light_azimuth.hi));
    env.light_elevation = quantize_f32(rng.uniform(cfg.light_elevation.lo, cfg.light_elevation.hi));
    env.light_intensity = quantize_f32(rng.uniform(cfg.light_intensity.lo, cfg.light_intensity.hi));
    env.light_ambient = quantize_f32(rng.uniform(cfg.light_ambient.lo, cfg.light_ambient.hi));
    env.focal_mm = cfg.focal_mm;
    env.sensor_mm = cfg.sensor_mm;
    env.width = cfg.width;
    env.height = cfg.height;
    env.background_id = backgrounds[size_t(rng.next_below(backgrounds.size()))];
    return env;
}

ScanAssets load_scan_assets(const GenerationConfig& cfg, const ScanEntry& entry) {
    ScanAssets assets;
    assets.id = entry.id;
    assets.mesh = mesh_io::load_mesh_file(cfg.resolve(entry.mesh_path));
    ensure_render_attributes(assets.mesh);
    assets.skeleton = load_rig_spec(read_file(cfg.resolve(entry.rig_path)));
    assets.binding = load_binding(cfg.resolve(entry.binding_path), assets.skeleton,
                                  assets.mesh.vertices.size());
    return assets;
}

std::string sample_basename(uint64_t index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%05llu", (unsigned long long)index);
    return buf;
}

// compact per-sample row: [theta..., root_ori(3), root_trans(3), camera(3),
// light(4), background_index, bbox(4)]
std::string sample_row(const SampleRecord& r, size_t bg_index) {
    std::string out = "[";
    auto num = [&](double v) {
        out += shortest_float(float(v));
        out += ',';
    };
    for (double t : r.pose.theta) num(t);
    num(r.pose.root_orientation.x); num(r.pose.root_orientation.y); num(r.pose.root_orientation.z);
    num(r.pose.root_translation.x); num(r.pose.root_translation.y); num(r.pose.root_translation.z);
    num(r.env.cam_radius); num(r.env.cam_azimuth); num(r.env.cam_elevation);
    num(r.env.light_azimuth); num(r.env.light_elevation); num(r.env.light_intensity); num(r.env.light_ambient);
    out += std::to_string(bg_index);
    out += ',' + std::to_string(r.bbox[0]) + ',' + std::to_string(r.bbox[1]) + ',' +
           std::to_string(r.bbox[2]) + ',' + std::to_string(r.bbox[3]) + ']';
    return out;
}

}  // namespace

std::string manifest_to_text(const Manifest& m) {
    json header;
    header["schema"] = m.schema;
    header["master_seed"] = m.master_seed;
    header["base_dir"] = m.base_dir;
    header["config"] = json::parse(m.config_json);
    header["checksums"] = m.checksums;
    header["backgrounds"] = m.backgrounds;

    // background name -> corpus index for compact per-sample storage
    std::map<std::string, size_t> bg_index;
    for (size_t i = 0; i < m.backgrounds.size(); ++i) bg_index[m.backgrounds[i]] = i;

    std::string out = header.dump();
    out.pop_back();  // strip trailing '}' so the scans array can be appended
    out += ",\"scans\":[";
    // group records by scan, preserving order
    std::vector<std::string> scan_order;
    for (const SampleRecord& r : m.records)
        if (scan_order.empty() || scan_order.back() != r.scan_id) {
            bool seen = false;
            for (const std::string& s : scan_order) seen = seen || s == r.scan_id;
            if (!seen) scan_order.push_back(r.scan_id);
        }
    for (size_t s = 0; s < scan_order.size(); ++s) {
        if (s) out += ',';
        out += "{\"id\":\"" + scan_order[s] + "\",\"samples\":[\n";
        bool first = true;
        for (const SampleRecord& r : m.records) {
            if (r.scan_id != scan_order[s]) continue;
            if (!first) out += ",\n";
            first = false;
            out += sample_row(r, bg_index.at(r.env.background_id));
        }
        out += "\n]}";
    }
    out += "]}\n";
    return out;
}

Manifest load_manifest(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(std::string("manifest: invalid JSON: ") + e.what());
    }
    Manifest m;
    m.schema = doc.at("schema").get<int>();
    if (m.schema != 1)
        throw ParseError("manifest: unsupported schema version " + std::to_string(m.schema));
    m.master_seed = doc.at("master_seed").get<uint64_t>();
    m.base_dir = doc.at("base_dir").get<std::string>();
    m.config_json = doc.at("config").dump();
    for (auto& [k, v] : doc.at("checksums").items()) m.checksums[k] = v.get<std::string>();
    for (const json& b : doc.at("backgrounds")) m.backgrounds.push_back(b.get<std::string>());

    GenerationConfig cfg = parse_generation_config(m.config_json, m.base_dir);
    for (const json& js : doc.at("scans")) {
        std::string scan_id = js.at("id").get<std::string>();
        uint64_t index = 0;
        for (const json& row : js.at("samples")) {
            if (!row.is_array() || row.size() < 18)
                throw ParseError("manifest: malformed sample row in scan " + scan_id);
            SampleRecord r;
            r.index = index;
            r.scan_id = scan_id;
            r.seed = derive_sample_seed(m.master_seed, scan_id, index);
            size_t n = row.size() - 18;
            size_t c = 0;
            r.pose.theta.resize(n);
            for (size_t i = 0; i < n; ++i) r.pose.theta[i] = quantize_f32(row[c++].get<double>());
            double* ori = &r.pose.root_orientation.x;
            for (int i = 0; i < 3; ++i) ori[i] = quantize_f32(row[c++].get<double>());
            double* tr = &r.pose.root_translation.x;
            for (int i = 0; i < 3; ++i) tr[i] = quantize_f32(row[c++].get<double>());
            r.env.cam_radius = quantize_f32(row[c++].get<double>());
            r.env.cam_azimuth = quantize_f32(row[c++].get<double>());
            r.env.cam_elevation = quantize_f32(row[c++].get<double>());
            r.env.light_azimuth = quantize_f32(row[c++].get<double>());
            r.env.light_elevation = quantize_f32(row[c++].get<double>());
            r.env.light_intensity = quantize_f32(row[c++].get<double>());
            r.env.light_ambient = quantize_f32(row[c++].get<double>());
            size_t bg = row[c++].get<size_t>();
            if (bg >= m.backgrounds.size())
                throw ParseError("manifest: background index out of range in scan " + scan_id);
            r.env.background_id = m.backgrounds[bg];
            r.env.focal_mm = cfg.focal_mm;
            r.env.sensor_mm = cfg.sensor_mm;
            r.env.width = cfg.width;
            r.env.height = cfg.height;
            for (int i = 0; i < 4; ++i) r.bbox[i] = row[c++].get<int>();
            r.adaptation = cfg.adaptation;
            m.records.push_back(std::move(r));
            ++index;
        }
    }
    return m;
}

std::string annotation_to_text(const SampleRecord& record) {
    json doc;
    doc["schema"] = 1;
    doc["sample"] = record.index;
    doc["scan"] = record.scan_id;
    doc["seed"] = record.seed;
    doc["pose"] = {{"theta", record.pose.theta},
                   {"root_orientation", {record.pose.root_orientation.x, record.pose.root_orientation.y,
                                         record.pose.root_orientation.z}},
                   {"root_translation", {record.pose.root_translation.x, record.pose.root_translation.y,
                                         record.pose.root_translation.z}}};
    doc["env"] = {{"camera", {record.env.cam_radius, record.env.cam_azimuth, record.env.cam_elevation}},
                  {"focal_mm", record.env.focal_mm},
                  {"sensor_mm", record.env.sensor_mm},
                  {"width", record.env.width},
                  {"height", record.env.height},
                  {"light", {record.env.light_azimuth, record.env.light_elevation,
                             record.env.light_intensity, record.env.light_ambient}},
                  {"background", record.env.background_id}};
    doc["adaptation"] = {{"mode", adaptation_mode_name(record.adaptation.mode)},
                         {"sigma", record.adaptation.sigma},
                         {"std", record.adaptation.std_levels}};
    json kps = json::array();
    for (int k = 0; k < kKeypointCount; ++k) {
        const JointAnnotation& a = record.keypoints[k];
        kps.push_back({{"name", keypoint_name(Keypoint(k))},
                       {"x", a.x}, {"y", a.y}, {"depth", a.depth},
                       {"visibility", visibility_name(a.visibility)}});
    }
    doc["keypoints"] = kps;
    doc["bbox"] = record.bbox;
    return doc.dump(1) + "\n";
}

SampleRecord annotation_from_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("annotation: invalid JSON: ") + e.what());
    }
    try {
        int schema = doc.at("schema").get<int>();
        if (schema != 1)
            throw ParseError("annotation: unsupported schema version " + std::to_string(schema));
        SampleRecord r;
        r.index = doc.at("sample").get<uint64_t>();
        r.scan_id = doc.at("scan").get<std::string>();
        r.seed = doc.at("seed").get<uint64_t>();
        const json& jp = doc.at("pose");
        for (const json& t : jp.at("theta")) r.pose.theta.push_back(t.get<double>());
        double* ori = &r.pose.root_orientation.x;
        double* tr = &r.pose.root_translation.x;
        for (int i = 0; i < 3; ++i) ori[i] = jp.at("root_orientation")[i].get<double>();
        for (int i = 0; i < 3; ++i) tr[i] = jp.at("root_translation")[i].get<double>();
        const json& je = doc.at("env");
        r.env.cam_radius = je.at("camera")[0].get<double>();
        r.env.cam_azimuth = je.at("camera")[1].get<double>();
        r.env.cam_elevation = je.at("camera")[2].get<double>();
        r.env.focal_mm = je.at("focal_mm").get<double>();
        r.env.sensor_mm = je.at("sensor_mm").get<double>();
        r.env.width = je.at("width").get<int>();
        r.env.height = je.at("height").get<int>();
        r.env.light_azimuth = je.at("light")[0].get<double>();
        r.env.light_elevation = je.at("light")[1].get<double>();
        r.env.light_intensity = je.at("light")[2].get<double>();
        r.env.light_ambient = je.at("light")[3].get<double>();
        r.env.background_id = je.at("background").get<std::string>();
        const json& ja = doc.at("adaptation");
        r.adaptation.mode = adaptation_mode_from(ja.at("mode").get<std::string>());
        r.adaptation.sigma = ja.at("sigma").get<double>();
        r.adaptation.std_levels = ja.at("std").get<double>();
        const json& jk = doc.at("keypoints");
        if (!jk.is_array() || jk.size() != size_t(kKeypointCount))
            throw ParseError("annotation: expected " + std::to_string(kKeypointCount) + " keypoints, got " +
                             std::to_string(jk.size()));
        for (int k = 0; k < kKeypointCount; ++k) {
            const json& e = jk[k];
            std::string name = e.at("name").get<std::string>();
            auto kp = keypoint_from_name(name);
            if (!kp || int(*kp) != k)
                throw ParseError("annotation: unexpected keypoint '" + name + "' at position " +
                                 std::to_string(k));
            r.keypoints[k].x = e.at("x").get<double>();
            r.keypoints[k].y = e.at("y").get<double>();
            r.keypoints[k].depth = e.at("depth").get<double>();
            r.keypoints[k].visibility = visibility_from_name(e.at("visibility").get<std::string>());
        }
        for (int i = 0; i < 4; ++i) r.bbox[i] = doc.at("bbox")[i].get<int>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("annotation: ") + e.what());
    }
}

void write_annotation(const std::string& path, const SampleRecord& record) {
    write_file(path, annotation_to_text(record));
}

SampleRecord read_annotation(const std::string& path) {
    return annotation_from_text(read_file(path));
}

namespace {

struct LoadedBackgrounds {
    std::vector<std::string> names;
    std::vector<Image> images;
    const Image& by_name(const std::string& id) const {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == id) return images[i];
        throw std::runtime_error("background not found in corpus: " + id);
    }
};

LoadedBackgrounds load_backgrounds(const std::string& dir) {
    LoadedBackgrounds out;
    out.names = list_backgrounds(dir);
    if (out.names.empty())
        throw std::runtime_error("background directory has no images: " + dir);
    for (const std::string& name : out.names)
        out.images.push_back(load_image((fs::path(dir) / name).string()));
    return out;
}

template <class Fn>
void parallel_samples(size_t total, int jobs, Fn&& body) {
    std::string first_error;
    #pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
    for (long i = 0; i < long(total); ++i) {
        try {
            body(size_t(i));
        } catch (const std::exception& e) {
            #pragma omp critical
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (!first_error.empty()) throw std::runtime_error(first_error);
}

}  // namespace

Manifest generate(const GenerationConfig& config, const std::string& out_dir, int jobs) {
    check_config_files(config);

    std::vector<ScanAssets> scans;
    std::vector<PreparedPoseSource> sources;
    for (const ScanEntry& e : config.scans) {
        scans.push_back(load_scan_assets(config, e));
        sources.push_back(prepare_pose_source(config, scans.back().skeleton));
    }
    LoadedBackgrounds backgrounds = load_backgrounds(config.resolve(config.background_dir));

    for (const ScanAssets& s : scans)
        fs::create_directories(fs::path(out_dir) / s.id);

    Manifest manifest;
    manifest.master_seed = config.master_seed;
    manifest.base_dir = config.base_dir;
    manifest.config_json = config_to_json(config).dump();
    manifest.backgrounds = backgrounds.names;
    for (const ScanEntry& e : config.scans) {
        manifest.checksums[e.mesh_path] = file_checksum(config.resolve(e.mesh_path));
        manifest.checksums[e.rig_path] = file_checksum(config.resolve(e.rig_path));
        manifest.checksums[e.binding_path] = file_checksum(config.resolve(e.binding_path));
    }
    manifest.checksums[config.pose_source.constraints_path] =
        file_checksum(config.resolve(config.pose_source.constraints_path));
    if (config.pose_source.type == PoseSourceType::Mocap) {
        manifest.checksums[config.pose_source.clip_path] =
            file_checksum(config.resolve(config.pose_source.clip_path));
        manifest.checksums[config.pose_source.retarget_path] =
            file_checksum(config.resolve(config.pose_source.retarget_path));
    }
    for (const std::string& bg : backgrounds.names) {
        std::string rel = (fs::path(config.background_dir) / bg).string();
        manifest.checksums[rel] = file_checksum(config.resolve(rel));
    }

    size_t per_scan = config.images_per_scan;
    size_t total = per_scan * config.scans.size();
    manifest.records.resize(total);

    parallel_samples(total, jobs, [&](size_t flat) {
        size_t scan_idx = flat / per_scan;
        uint64_t index = flat % per_scan;
        const ScanAssets& scan = scans[scan_idx];
        try {
            SampleRecord r;
            r.index = index;
            r.scan_id = scan.id;
            r.seed = derive_sample_seed(config.master_seed, scan.id, index);
            Rng rng(r.seed);
            r.pose = draw_pose(config, sources[scan_idx], index, rng);
            r.env = draw_env(config, backgrounds.names, rng);
            r.adaptation = config.adaptation;

            RenderedSample rendered = render_sample(scan, backgrounds.by_name(r.env.background_id),
                                                    r.pose, r.env, r.adaptation, r.seed);
            r.keypoints = rendered.keypoints;
            r.bbox = rendered.bbox;

            std::string base = (fs::path(out_dir) / scan.id / sample_basename(index)).string();
            save_png(base + ".png", rendered.image);
            write_annotation(base + ".json", r);
            manifest.records[flat] = std::move(r);
        } catch (const std::exception& e) {
            throw std::runtime_error("sample " + scan.id + "/" + std::to_string(index) + ": " + e.what());
        }
    });

    write_file((fs::path(out_dir) / "manifest.json").string(), manifest_to_text(manifest));
    return manifest;
}

void replay(const std::string& manifest_path, const std::string& out_dir,
            const std::string& assets_dir_override, int jobs) {
    Manifest m = load_manifest(manifest_path);
    if (!assets_dir_override.empty()) m.base_dir = assets_dir_override;
    GenerationConfig cfg = parse_generation_config(m.config_json, m.base_dir);

    // verify asset checksums before rendering anything
    std::string diff;
    for (const auto& [rel, expected] : m.checksums) {
        std::string full = cfg.resolve(rel);
        if (!fs::exists(full)) {
            diff += "  missing: " + rel + "\n";
            continue;
        }
        std::string actual = file_checksum(full);
        if (actual != expected)
            diff += "  changed: " + rel + " (expected " + expected + ", got " + actual + ")\n";
    }
    if (!diff.empty())
        throw std::runtime_error("replay refused: asset checksums do not match the manifest:\n" + diff);

    std::vector<ScanAssets> scans;
    std::map<std::string, size_t> scan_index;
    for (const ScanEntry& e : cfg.scans) {
        scan_index[e.id] = scans.size();
        scans.push_back(load_scan_assets(cfg, e));
        fs::create_directories(fs::path(out_dir) / e.id);
    }
    LoadedBackgrounds backgrounds = load_backgrounds(cfg.resolve(cfg.background_dir));
    for (const SampleRecord& r : m.records)
        backgrounds.by_name(r.env.background_id);  // fail early, naming the background

    parallel_samples(m.records.size(), jobs, [&](size_t i) {
        const SampleRecord& r = m.records[i];
        try {
            const ScanAssets& scan = scans.at(scan_index.at(r.scan_id));
            RenderedSample rendered = render_sample(scan, backgrounds.by_name(r.env.background_id),
                                                    r.pose, r.env, r.adaptation, r.seed);
            std::string base = (fs::path(out_dir) / r.scan_id / sample_basename(r.index)).string();
            save_png(base + ".png", rendered.image);
        } catch (const std::exception& e) {
            throw std::runtime_error("sample " + r.scan_id + "/" + std::to_string(r.index) + ": " +
                                     e.what());
        }
    });
}

}  // namespace posegen
