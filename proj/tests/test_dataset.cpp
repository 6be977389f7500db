#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "posegen/errors.hpp"
#include "posegen/floatfmt.hpp"
#include "posegen/dataset.hpp"
#include "posegen/demo_assets.hpp"

using namespace posegen;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string& assets_dir() {
    static std::string dir = [] {
        std::string d = (fs::temp_directory_path() / "pg_test_assets").string();
        emit_demo_assets(d);
        return d;
    }();
    return dir;
}

GenerationConfig small_config(size_t images = 6) {
    GenerationConfig cfg = load_generation_config(assets_dir() + "/config.json");
    cfg.images_per_scan = images;
    cfg.width = cfg.height = 96;
    return cfg;
}

fs::path fresh_dir(const char* name) {
    fs::path d = fs::temp_directory_path() / name;
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("demo config loads with resolved paths and bundled defaults") {
    GenerationConfig cfg = load_generation_config(assets_dir() + "/config.json");
    CHECK(cfg.scans.size() == 1);
    CHECK(cfg.scans[0].id == "capsule");
    CHECK(cfg.pose_source.type == PoseSourceType::Uniform);
    CHECK(cfg.master_seed == 42);
    CHECK(cfg.focal_mm == 35);
    CHECK(cfg.camera_azimuth.lo == doctest::Approx(deg2rad(-60)));
    CHECK(fs::exists(cfg.resolve(cfg.scans[0].mesh_path)));
}

TEST_CASE("config errors name the offending file or field") {
    // missing mesh
    std::string bad = slurp(assets_dir() + "/config.json");
    std::string missing = bad;
    missing.replace(missing.find("capsule.ply"), 11, "missing.ply");
    {
        std::ofstream out(fs::temp_directory_path() / "pg_bad.json");
        out << missing;
    }
    try {
        load_generation_config((fs::temp_directory_path() / "pg_bad.json").string());
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("missing.ply") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_generation_config("{", "."), ParseError);
    CHECK_THROWS_AS(parse_generation_config(R"({"scans": []})", "."), ParseError);
    std::string bad_mode = bad;
    bad_mode.replace(bad_mode.find("\"none\""), 6, "\"fog\"");
    CHECK_THROWS_AS(parse_generation_config(bad_mode, assets_dir()), ParseError);
}

TEST_CASE("generate writes images, sidecars, and a manifest that round-trips") {
    GenerationConfig cfg = small_config();
    fs::path out = fresh_dir("pg_gen");
    Manifest m = generate(cfg, out.string());
    REQUIRE(m.records.size() == 6);
    for (int i = 0; i < 6; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "%05d", i);
        CHECK(fs::exists(out / "capsule" / (std::string(name) + ".png")));
        CHECK(fs::exists(out / "capsule" / (std::string(name) + ".json")));
    }

    Manifest back = load_manifest((out / "manifest.json").string());
    CHECK(back.master_seed == m.master_seed);
    CHECK(back.backgrounds == m.backgrounds);
    CHECK(back.checksums == m.checksums);
    REQUIRE(back.records.size() == m.records.size());
    for (size_t i = 0; i < m.records.size(); ++i) {
        const SampleRecord &a = m.records[i], &b = back.records[i];
        CHECK(a.seed == b.seed);
        CHECK(a.pose.theta == b.pose.theta);            // float32 values survive the text exactly
        CHECK(a.pose.root_orientation == b.pose.root_orientation);
        CHECK(a.env.cam_radius == b.env.cam_radius);
        CHECK(a.env.cam_azimuth == b.env.cam_azimuth);
        CHECK(a.env.light_intensity == b.env.light_intensity);
        CHECK(a.env.background_id == b.env.background_id);
        CHECK(a.bbox == b.bbox);
    }
    // and re-serializing the parsed manifest is byte-identical
    CHECK(manifest_to_text(back) == slurp(out / "manifest.json"));
}

TEST_CASE("per-sample draws respect the configured ranges") {
    GenerationConfig cfg = small_config(20);
    fs::path out = fresh_dir("pg_ranges");
    Manifest m = generate(cfg, out.string());
    for (const SampleRecord& r : m.records) {
        CHECK(r.env.cam_radius >= cfg.camera_radius.lo);
        CHECK(r.env.cam_radius <= cfg.camera_radius.hi);
        CHECK(r.env.cam_azimuth >= cfg.camera_azimuth.lo);
        CHECK(r.env.cam_azimuth <= cfg.camera_azimuth.hi);
        CHECK(r.env.cam_elevation >= cfg.camera_elevation.lo);
        CHECK(r.env.cam_elevation <= cfg.camera_elevation.hi);
        CHECK(r.env.light_intensity >= cfg.light_intensity.lo);
        CHECK(r.env.light_intensity <= cfg.light_intensity.hi);
        CHECK(r.seed == derive_sample_seed(cfg.master_seed, r.scan_id, r.index));
        CHECK(r.bbox[0] >= 0);  // subject in frame for the demo camera ranges
    }
}

TEST_CASE("two generations with the same config are byte-identical") {
    GenerationConfig cfg = small_config();
    fs::path a = fresh_dir("pg_det_a"), b = fresh_dir("pg_det_b");
    generate(cfg, a.string());
    generate(cfg, b.string());
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        fs::path rel = fs::relative(e.path(), a);
        CHECK(slurp(e.path()) == slurp(b / rel));
    }
    // a different master seed changes the output
    cfg.master_seed = 43;
    fs::path c = fresh_dir("pg_det_c");
    generate(cfg, c.string());
    CHECK(slurp(a / "capsule" / "00000.png") != slurp(c / "capsule" / "00000.png"));
}

TEST_CASE("replay reproduces the original images bit-exactly") {
    GenerationConfig cfg = small_config();
    fs::path out = fresh_dir("pg_rep_src"), rep = fresh_dir("pg_rep_dst");
    generate(cfg, out.string());
    replay((out / "manifest.json").string(), rep.string());
    for (int i = 0; i < 6; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "%05d.png", i);
        CHECK(slurp(out / "capsule" / name) == slurp(rep / "capsule" / name));
    }
}

TEST_CASE("replay refuses when an asset checksum changed, naming the file") {
    GenerationConfig cfg = small_config(2);
    fs::path out = fresh_dir("pg_rep_bad");
    generate(cfg, out.string());
    // copy the assets, corrupt the binding, point the manifest at the copy
    fs::path tampered = fresh_dir("pg_tampered_assets");
    fs::copy(assets_dir(), tampered, fs::copy_options::recursive);
    std::ofstream(tampered / "capsule.binding", std::ios::app) << "\n";
    try {
        replay((out / "manifest.json").string(), fresh_dir("pg_rep_bad_out").string(),
               tampered.string());
        FAIL("expected a checksum error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("capsule.binding") != std::string::npos);
    }
}

TEST_CASE("render_sample is a pure function of its inputs") {
    GenerationConfig cfg = small_config(1);
    fs::path out = fresh_dir("pg_pure");
    Manifest m = generate(cfg, out.string());
    const SampleRecord& r = m.records[0];

    ScanAssets assets;
    assets.id = "capsule";
    assets.mesh = mesh_io::load_mesh_file(cfg.resolve(cfg.scans[0].mesh_path));
    ensure_render_attributes(assets.mesh);
    assets.skeleton = load_rig_spec(slurp(cfg.resolve(cfg.scans[0].rig_path)));
    assets.binding = load_binding(cfg.resolve(cfg.scans[0].binding_path), assets.skeleton,
                                  assets.mesh.vertices.size());
    Image bg = load_image(cfg.resolve(cfg.background_dir) + "/" + r.env.background_id);

    RenderedSample s1 = render_sample(assets, bg, r.pose, r.env, r.adaptation, r.seed);
    RenderedSample s2 = render_sample(assets, bg, r.pose, r.env, r.adaptation, r.seed);
    CHECK(s1.image == s2.image);
    CHECK(s1.bbox == r.bbox);
    for (int k = 0; k < kKeypointCount; ++k) {
        CHECK(s1.keypoints[k].x == r.keypoints[k].x);
        CHECK(s1.keypoints[k].visibility == r.keypoints[k].visibility);
    }
}

TEST_CASE("editing a single record re-renders only that sample differently") {
    GenerationConfig cfg = small_config(3);
    fs::path out = fresh_dir("pg_edit_src");
    generate(cfg, out.string());

    Manifest m = load_manifest((out / "manifest.json").string());
    m.records[1].env.cam_azimuth = quantize_f32(m.records[1].env.cam_azimuth + 0.5);
    fs::path edited = fresh_dir("pg_edit_manifest");
    fs::create_directories(edited);
    {
        std::ofstream f(edited / "manifest.json", std::ios::binary);
        f << manifest_to_text(m);
    }
    fs::path rep = fresh_dir("pg_edit_out");
    replay((edited / "manifest.json").string(), rep.string());
    CHECK(slurp(out / "capsule" / "00000.png") == slurp(rep / "capsule" / "00000.png"));
    CHECK(slurp(out / "capsule" / "00001.png") != slurp(rep / "capsule" / "00001.png"));
    CHECK(slurp(out / "capsule" / "00002.png") == slurp(rep / "capsule" / "00002.png"));
}

TEST_CASE("annotation sidecar text round-trips every field") {
    GenerationConfig cfg = small_config(1);
    cfg.adaptation.mode = AdaptationMode::WhiteNoise;
    cfg.adaptation.std_levels = 7.5;
    fs::path out = fresh_dir("pg_ann");
    Manifest m = generate(cfg, out.string());
    const SampleRecord& r = m.records[0];
    SampleRecord back = annotation_from_text(annotation_to_text(r));
    CHECK(back.index == r.index);
    CHECK(back.scan_id == r.scan_id);
    CHECK(back.seed == r.seed);
    CHECK(back.pose.theta == r.pose.theta);
    CHECK(back.pose.root_orientation == r.pose.root_orientation);
    CHECK(back.env.cam_radius == r.env.cam_radius);
    CHECK(back.env.background_id == r.env.background_id);
    CHECK(back.adaptation.mode == AdaptationMode::WhiteNoise);
    CHECK(back.adaptation.std_levels == 7.5);
    CHECK(back.bbox == r.bbox);
    for (int k = 0; k < kKeypointCount; ++k) {
        CHECK(back.keypoints[k].x == r.keypoints[k].x);
        CHECK(back.keypoints[k].y == r.keypoints[k].y);
        CHECK(back.keypoints[k].depth == r.keypoints[k].depth);
        CHECK(back.keypoints[k].visibility == r.keypoints[k].visibility);
    }
    // the sidecar on disk parses to the same record
    SampleRecord disk = read_annotation((out / "capsule" / "00000.json").string());
    CHECK(disk.seed == r.seed);
    CHECK(disk.pose.theta == r.pose.theta);
}

TEST_CASE("annotation parser rejects wrong schema and missing keypoints") {
    GenerationConfig cfg = small_config(1);
    fs::path out = fresh_dir("pg_ann_bad");
    generate(cfg, out.string());
    std::string text = slurp(out / "capsule" / "00000.json");
    CHECK_THROWS_AS(annotation_from_text("{}"), ParseError);
    std::string wrong_schema = text;
    wrong_schema.replace(wrong_schema.find("\"schema\": 1"), 11, "\"schema\": 9");
    CHECK_THROWS_AS(annotation_from_text(wrong_schema), ParseError);
}

TEST_CASE("adaptation modes produce distinct but deterministic imagery") {
    for (auto mode : {AdaptationMode::Gauss, AdaptationMode::WhiteNoise}) {
        GenerationConfig cfg = small_config(1);
        cfg.adaptation.mode = mode;
        fs::path a = fresh_dir("pg_adapt_a"), b = fresh_dir("pg_adapt_b");
        generate(cfg, a.string());
        generate(cfg, b.string());
        CHECK(slurp(a / "capsule" / "00000.png") == slurp(b / "capsule" / "00000.png"));

        GenerationConfig plain = small_config(1);
        fs::path c = fresh_dir("pg_adapt_c");
        generate(plain, c.string());
        CHECK(slurp(a / "capsule" / "00000.png") != slurp(c / "capsule" / "00000.png"));
    }
}

TEST_CASE("grid pose source enumerates the lattice deterministically") {
    GenerationConfig cfg = small_config(6);
    cfg.pose_source.type = PoseSourceType::Grid;
    cfg.pose_source.grid_dofs = {"elbow_r", "knee_l"};
    cfg.pose_source.grid_steps = {3, 2};
    fs::path out = fresh_dir("pg_grid");
    Manifest m = generate(cfg, out.string());
    REQUIRE(m.records.size() == 6);
    Skeleton s = canonical_rig();
    int elbow = s.dof_index("elbow_r"), knee = s.dof_index("knee_l");
    CHECK(m.records[0].pose.theta[elbow] == 0.0);
    CHECK(m.records[1].pose.theta[knee] == quantize_f32(deg2rad(140)));
    CHECK(m.records[2].pose.theta[elbow] == quantize_f32(deg2rad(72.5)));
    CHECK(m.records[5].pose.theta[elbow] == quantize_f32(deg2rad(145)));
    // neck stays at the zero base pose in grid mode
    CHECK(m.records[3].pose.theta[s.dof_index("neck_x")] == 0.0);
}

TEST_CASE("manifest stays compact: under 500 bytes per sample") {
    GenerationConfig cfg = small_config(40);
    fs::path out = fresh_dir("pg_compact");
    generate(cfg, out.string());
    size_t bytes = fs::file_size(out / "manifest.json");
    CHECK(bytes < 40 * 500);
}

TEST_CASE("file_checksum is stable and content-sensitive") {
    fs::path p = fs::temp_directory_path() / "pg_ck.txt";
    {
        std::ofstream f(p, std::ios::binary);
        f << "hello";
    }
    std::string a = file_checksum(p.string());
    CHECK(a == file_checksum(p.string()));
    CHECK(a.size() == 16);
    {
        std::ofstream f(p, std::ios::binary);
        f << "hellp";
    }
    CHECK(a != file_checksum(p.string()));
}

TEST_CASE("list_backgrounds is sorted and filtered to images") {
    auto names = list_backgrounds(assets_dir() + "/backgrounds");
    REQUIRE(names.size() == 4);
    CHECK(std::is_sorted(names.begin(), names.end()));
    for (const std::string& n : names) CHECK(n.find(".png") != std::string::npos);
}
