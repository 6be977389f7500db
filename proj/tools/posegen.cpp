// posegen: synthetic pose dataset toolchain CLI.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "posegen/dataset.hpp"
#include "posegen/demo_assets.hpp"
#include "posegen/domain_adapt.hpp"
#include "posegen/evaluation.hpp"
#include "posegen/floatfmt.hpp"

namespace fs = std::filesystem;
using namespace posegen;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_inspect_mesh(const std::string& path) {
    Mesh mesh = mesh_io::load_mesh_file(path);
    std::cout << diagnose(mesh).to_text();
    return 0;
}

int run_bind(const std::string& mesh_path, const std::string& rig_path,
             const std::string& out_path, const std::string& mode) {
    Mesh mesh = mesh_io::load_mesh_file(mesh_path);
    Skeleton skeleton = load_rig_spec(read_file(rig_path));
    auto m = mode == "blend" ? VertexBinding::Mode::Blend : VertexBinding::Mode::Rigid;
    VertexBinding binding = auto_bind(mesh, skeleton, m);
    save_binding(out_path, binding, skeleton);
    std::cout << "bound " << mesh.vertices.size() << " vertices to " << skeleton.bones.size()
              << " bones (" << mode << ")\n";
    return 0;
}

std::string pose_row(const PoseVector& p) {
    std::string out = "[";
    auto num = [&](double v, bool last = false) {
        out += shortest_float(float(v));
        if (!last) out += ',';
    };
    for (double t : p.theta) num(t);
    num(p.root_orientation.x); num(p.root_orientation.y); num(p.root_orientation.z);
    num(p.root_translation.x); num(p.root_translation.y); num(p.root_translation.z, true);
    return out + ']';
}

int run_sample_poses(const std::string& rig_json, const std::string& constraints_path,
                     size_t count, uint64_t seed, const std::vector<std::string>& grid,
                     const std::string& out_path) {
    Skeleton skeleton = load_rig_spec(rig_json);
    ConstraintMatrix constraints = constraints_path.empty()
                                       ? load_constraints(default_constraints_json(), skeleton)
                                       : load_constraints(read_file(constraints_path), skeleton);
    std::vector<PoseVector> poses;
    if (!grid.empty()) {
        std::vector<int> dofs;
        std::vector<int> steps;
        for (const std::string& spec : grid) {
            auto eq = spec.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("--grid expects name=steps, got '" + spec + "'");
            int idx = skeleton.dof_index(spec.substr(0, eq));
            if (idx < 0) throw std::runtime_error("unknown DOF name '" + spec.substr(0, eq) + "'");
            dofs.push_back(idx);
            steps.push_back(std::stoi(spec.substr(eq + 1)));
        }
        poses = sample_grid(constraints, dofs, steps, PoseVector::zeros(skeleton));
    } else {
        Rng rng(seed);
        for (size_t i = 0; i < count; ++i) poses.push_back(sample_uniform(constraints, rng));
    }

    std::string text = "{\"dofs\":[";
    auto names = skeleton.dof_names();
    for (size_t i = 0; i < names.size(); ++i)
        text += (i ? ",\"" : "\"") + names[i] + "\"";
    text += "],\"poses\":[\n";
    for (size_t i = 0; i < poses.size(); ++i) {
        if (i) text += ",\n";
        text += pose_row(poses[i]);
    }
    text += "\n]}\n";

    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write file: " + out_path);
        out << text;
    }
    return 0;
}

int run_adapt(const std::string& in_path, const std::string& out_path, const std::string& mode,
              double sigma, double std_levels, uint64_t seed) {
    auto process = [&](const std::string& src, const std::string& dst, uint64_t file_seed) {
        Image img = load_image(src);
        if (mode == "gauss") {
            img = gaussian_blur(img, sigma);
        } else if (mode == "white_noise") {
            Rng rng(file_seed);
            img = add_white_noise(img, std_levels, rng);
        } else {
            throw std::runtime_error("unknown adaptation mode '" + mode + "'");
        }
        save_png(dst, img);
    };
    if (fs::is_directory(in_path)) {
        fs::create_directories(out_path);
        std::vector<std::string> names = list_backgrounds(in_path);
        if (names.empty()) throw std::runtime_error("no images found in " + in_path);
        for (const std::string& name : names) {
            // per-file seed keyed by name so results don't depend on listing order
            uint64_t file_seed = mix64(seed ^ fnv1a64(name));
            std::string dst = (fs::path(out_path) / fs::path(name).stem()).string() + ".png";
            process((fs::path(in_path) / name).string(), dst, file_seed);
        }
        std::cout << "adapted " << names.size() << " images\n";
    } else {
        process(in_path, out_path, seed);
    }
    return 0;
}

// annotation sidecars under a directory, keyed by path relative to it
std::vector<std::pair<std::string, std::string>> annotation_files(const std::string& dir) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".json") continue;
        if (e.path().filename() == "manifest.json") continue;
        out.emplace_back(fs::relative(e.path(), dir).string(), e.path().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

KeypointSet keypoint_set(const SampleRecord& r) {
    KeypointSet s;
    for (int k = 0; k < kKeypointCount; ++k) {
        s.points[k] = {r.keypoints[k].x, r.keypoints[k].y};
        s.visibility[k] = r.keypoints[k].visibility;
    }
    s.bbox = r.bbox;
    return s;
}

int run_eval_pck(const std::string& pred_dir, const std::string& gt_dir,
                 const std::string& alpha_list, const std::string& ref,
                 bool include_occluded) {
    auto preds = annotation_files(pred_dir);
    auto gts = annotation_files(gt_dir);
    if (gts.empty()) throw std::runtime_error("no annotation files under " + gt_dir);
    if (preds.size() != gts.size())
        throw std::runtime_error("prediction/ground-truth file counts differ (" +
                                 std::to_string(preds.size()) + " vs " + std::to_string(gts.size()) + ")");
    std::vector<KeypointSet> pred_sets, gt_sets;
    for (size_t i = 0; i < gts.size(); ++i) {
        if (preds[i].first != gts[i].first)
            throw std::runtime_error("annotation mismatch: " + preds[i].first + " vs " + gts[i].first);
        pred_sets.push_back(keypoint_set(read_annotation(preds[i].second)));
        gt_sets.push_back(keypoint_set(read_annotation(gts[i].second)));
    }
    std::vector<double> alphas;
    std::stringstream ss(alpha_list);
    std::string item;
    while (std::getline(ss, item, ',')) alphas.push_back(std::stod(item));
    if (alphas.empty()) throw std::runtime_error("--alpha list is empty");
    PckReference mode = ref == "bbox" ? PckReference::Bbox : PckReference::Torso;
    std::cout << pck_table(pck_curve(pred_sets, gt_sets, alphas, mode, include_occluded));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthetic human-pose dataset toolchain"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string mesh_path, rig_path, constraints_path, binding_out, mode = "rigid";
    auto* inspect = app.add_subcommand("inspect-mesh", "print mesh diagnostics");
    inspect->add_option("mesh", mesh_path, "mesh file (.obj/.ply)")->required();

    auto* bind = app.add_subcommand("bind", "label vertices with bones");
    bind->add_option("mesh", mesh_path, "mesh file")->required();
    bind->add_option("--rig", rig_path, "rig spec JSON")->required();
    bind->add_option("--out", binding_out, "output binding file")->required();
    bind->add_option("--mode", mode, "rigid|blend")->check(CLI::IsMember({"rigid", "blend"}));

    size_t count = 10;
    uint64_t seed = 0;
    std::vector<std::string> grid;
    std::string poses_out;
    auto* sample = app.add_subcommand("sample-poses", "draw pose vectors");
    sample->add_option("--rig", rig_path, "rig spec JSON (default: bundled rig)");
    sample->add_option("--constraints", constraints_path, "constraints JSON (default: bundled)");
    sample->add_option("--count", count, "number of uniform samples");
    sample->add_option("--seed", seed, "RNG seed");
    sample->add_option("--grid", grid, "grid mode: DOF=steps (repeatable)");
    sample->add_option("--out", poses_out, "output file ('-' = stdout)");

    std::string config_path, out_dir;
    int jobs = 0;
    bool seed_set = false;
    auto* gen = app.add_subcommand("generate", "generate a dataset");
    gen->add_option("--config", config_path, "generation config JSON")->required();
    gen->add_option("--out", out_dir, "output directory")->required();
    gen->add_option("--seed", seed, "override the config's master seed")
        ->each([&](const std::string&) { seed_set = true; });
    gen->add_option("--jobs", jobs, "parallel workers (0 = all cores)");

    std::string manifest_path, assets_dir;
    auto* rep = app.add_subcommand("replay", "re-render a dataset from its manifest");
    rep->add_option("--manifest", manifest_path, "manifest.json path")->required();
    rep->add_option("--out", out_dir, "output directory")->required();
    rep->add_option("--assets", assets_dir, "override the manifest's asset base directory");
    rep->add_option("--jobs", jobs, "parallel workers (0 = all cores)");

    std::string adapt_in, adapt_out, adapt_mode = "gauss";
    double sigma = 1.5, std_levels = 10;
    auto* adapt = app.add_subcommand("adapt", "apply domain adaptation to images");
    adapt->add_option("input", adapt_in, "image file or directory")->required();
    adapt->add_option("--out", adapt_out, "output file or directory")->required();
    adapt->add_option("--mode", adapt_mode, "gauss|white_noise")
        ->check(CLI::IsMember({"gauss", "white_noise"}));
    adapt->add_option("--sigma", sigma, "gaussian sigma in pixels");
    adapt->add_option("--std", std_levels, "noise std in 8-bit levels");
    adapt->add_option("--seed", seed, "noise seed");

    std::string pred_dir, gt_dir, alpha_list = "0.2,0.5", ref = "torso";
    bool exclude_occluded = false;
    auto* evalp = app.add_subcommand("eval-pck", "PCK accuracy table from annotation directories");
    evalp->add_option("--pred", pred_dir, "predicted annotations directory")->required();
    evalp->add_option("--gt", gt_dir, "ground-truth annotations directory")->required();
    evalp->add_option("--alpha", alpha_list, "comma-separated alphas (ascending)");
    evalp->add_option("--ref", ref, "torso|bbox")->check(CLI::IsMember({"torso", "bbox"}));
    evalp->add_flag("--exclude-occluded", exclude_occluded, "skip occluded GT keypoints");

    auto* demo = app.add_subcommand("demo-assets", "emit the bundled capsule-person fixture");
    demo->add_option("--out", out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*inspect) return run_inspect_mesh(mesh_path);
        if (*bind) return run_bind(mesh_path, rig_path, binding_out, mode);
        if (*sample) {
            std::string rig_json = rig_path.empty() ? canonical_rig_json() : read_file(rig_path);
            return run_sample_poses(rig_json, constraints_path, count, seed, grid, poses_out);
        }
        if (*gen) {
            GenerationConfig cfg = load_generation_config(config_path);
            if (seed_set) cfg.master_seed = seed;
            Manifest m = generate(cfg, out_dir, jobs);
            std::cout << "generated " << m.records.size() << " samples -> " << out_dir << "\n";
            return 0;
        }
        if (*rep) {
            replay(manifest_path, out_dir, assets_dir, jobs);
            std::cout << "replayed -> " << out_dir << "\n";
            return 0;
        }
        if (*adapt) return run_adapt(adapt_in, adapt_out, adapt_mode, sigma, std_levels, seed);
        if (*evalp) return run_eval_pck(pred_dir, gt_dir, alpha_list, ref, !exclude_occluded);
        if (*demo) {
            emit_demo_assets(out_dir);
            std::cout << "demo assets -> " << out_dir << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
