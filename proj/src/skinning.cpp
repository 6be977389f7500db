#include "posegen/skinning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace posegen {

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    return norm(p - (a + ab * t));
}

namespace {

constexpr double kBlendEps = 1e-6;  // meters; avoids division by zero on-segment

void check_frames_overlap(const Mesh& mesh, const Skeleton& skeleton) {
    Vec3 mesh_min = mesh.vertices[0], mesh_max = mesh.vertices[0];
    for (const Vec3& v : mesh.vertices) {
        mesh_min = {std::min(mesh_min.x, v.x), std::min(mesh_min.y, v.y), std::min(mesh_min.z, v.z)};
        mesh_max = {std::max(mesh_max.x, v.x), std::max(mesh_max.y, v.y), std::max(mesh_max.z, v.z)};
    }
    Vec3 skel_min = skeleton.bones[0].head, skel_max = skeleton.bones[0].head;
    for (const Bone& b : skeleton.bones)
        for (const Vec3& p : {b.head, b.tail}) {
            skel_min = {std::min(skel_min.x, p.x), std::min(skel_min.y, p.y), std::min(skel_min.z, p.z)};
            skel_max = {std::max(skel_max.x, p.x), std::max(skel_max.y, p.y), std::max(skel_max.z, p.z)};
        }
    bool disjoint = mesh_max.x < skel_min.x || skel_max.x < mesh_min.x ||
                    mesh_max.y < skel_min.y || skel_max.y < mesh_min.y ||
                    mesh_max.z < skel_min.z || skel_max.z < mesh_min.z;
    if (disjoint)
        throw std::invalid_argument(
            "auto_bind: mesh and skeleton bounding boxes are disjoint (coordinate frame mismatch?)");
}

}  // namespace

VertexBinding auto_bind(const Mesh& mesh, const Skeleton& skeleton, VertexBinding::Mode mode) {
    if (mesh.vertices.empty()) throw std::invalid_argument("auto_bind: empty mesh");
    check_frames_overlap(mesh, skeleton);

    VertexBinding out;
    out.mode = mode;
    size_t nb = skeleton.bones.size();
    if (mode == VertexBinding::Mode::Rigid) {
        out.labels.resize(mesh.vertices.size());
        #pragma omp parallel for
        for (long vi = 0; vi < long(mesh.vertices.size()); ++vi) {
            double best = std::numeric_limits<double>::infinity();
            int best_bone = 0;
            for (size_t bi = 0; bi < nb; ++bi) {
                double d = point_segment_distance(mesh.vertices[vi], skeleton.bones[bi].head,
                                                  skeleton.bones[bi].tail);
                if (d < best) { best = d; best_bone = int(bi); }
            }
            out.labels[vi] = best_bone;
        }
    } else {
        out.weights.resize(mesh.vertices.size());
        #pragma omp parallel for
        for (long vi = 0; vi < long(mesh.vertices.size()); ++vi) {
            std::vector<std::pair<double, int>> dists(nb);
            for (size_t bi = 0; bi < nb; ++bi)
                dists[bi] = {point_segment_distance(mesh.vertices[vi], skeleton.bones[bi].head,
                                                    skeleton.bones[bi].tail),
                             int(bi)};
            std::stable_sort(dists.begin(), dists.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            size_t k = std::min<size_t>(2, nb);
            double total = 0;
            std::vector<BoneWeight> w;
            for (size_t i = 0; i < k; ++i) {
                double wi = 1.0 / ((dists[i].first + kBlendEps) * (dists[i].first + kBlendEps));
                w.push_back({dists[i].second, wi});
                total += wi;
            }
            for (BoneWeight& bw : w) bw.weight /= total;
            out.weights[vi] = std::move(w);
        }
    }
    return out;
}

std::string binding_to_text(const VertexBinding& binding, const Skeleton& skeleton) {
    std::ostringstream os;
    os.precision(17);
    if (binding.mode == VertexBinding::Mode::Rigid) {
        for (size_t i = 0; i < binding.labels.size(); ++i)
            os << i << " " << skeleton.bones[binding.labels[i]].name << "\n";
    } else {
        for (size_t i = 0; i < binding.weights.size(); ++i) {
            os << i << " ";
            for (size_t k = 0; k < binding.weights[i].size(); ++k) {
                if (k) os << ",";
                os << skeleton.bones[binding.weights[i][k].bone].name << ":"
                   << binding.weights[i][k].weight;
            }
            os << "\n";
        }
    }
    return os.str();
}

VertexBinding binding_from_text(const std::string& text, const Skeleton& skeleton) {
    VertexBinding out;
    bool mode_known = false;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        size_t index;
        std::string spec;
        if (!(ls >> index >> spec))
            throw ParseError("binding line " + std::to_string(lineno) + ": expected 'index bone[...]'");
        bool blended = spec.find(':') != std::string::npos;
        if (!mode_known) {
            out.mode = blended ? VertexBinding::Mode::Blend : VertexBinding::Mode::Rigid;
            mode_known = true;
        } else if (blended != (out.mode == VertexBinding::Mode::Blend)) {
            throw ParseError("binding line " + std::to_string(lineno) + ": mixed rigid/blend records");
        }
        if (out.mode == VertexBinding::Mode::Rigid) {
            int bi = skeleton.bone_index(spec);
            if (bi < 0)
                throw ParseError("binding line " + std::to_string(lineno) + ": unknown bone '" + spec + "'");
            if (index != out.labels.size())
                throw ParseError("binding line " + std::to_string(lineno) + ": out-of-order vertex index");
            out.labels.push_back(bi);
        } else {
            std::vector<BoneWeight> w;
            std::istringstream ps(spec);
            std::string part;
            double total = 0;
            while (std::getline(ps, part, ',')) {
                size_t colon = part.find(':');
                if (colon == std::string::npos)
                    throw ParseError("binding line " + std::to_string(lineno) + ": malformed weight entry");
                std::string bone = part.substr(0, colon);
                int bi = skeleton.bone_index(bone);
                if (bi < 0)
                    throw ParseError("binding line " + std::to_string(lineno) + ": unknown bone '" + bone + "'");
                double weight = std::strtod(part.c_str() + colon + 1, nullptr);
                if (weight < 0)
                    throw ParseError("binding line " + std::to_string(lineno) + ": negative weight");
                w.push_back({bi, weight});
                total += weight;
            }
            if (w.size() > 4)
                throw ParseError("binding line " + std::to_string(lineno) + ": more than 4 bone weights");
            if (std::abs(total - 1.0) > 1e-6)
                throw ParseError("binding line " + std::to_string(lineno) + ": weights do not sum to 1");
            if (index != out.weights.size())
                throw ParseError("binding line " + std::to_string(lineno) + ": out-of-order vertex index");
            out.weights.push_back(std::move(w));
        }
    }
    return out;
}

void save_binding(const std::string& path, const VertexBinding& binding, const Skeleton& skeleton) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write binding file: " + path);
    out << binding_to_text(binding, skeleton);
}

VertexBinding load_binding(const std::string& path, const Skeleton& skeleton, size_t expect_vertices) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open binding file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    VertexBinding b = binding_from_text(ss.str(), skeleton);
    if (b.vertex_count() != expect_vertices)
        throw std::runtime_error("binding file " + path + " has " + std::to_string(b.vertex_count()) +
                                 " records, mesh has " + std::to_string(expect_vertices) + " vertices");
    return b;
}

Mesh apply_pose(const Mesh& mesh, const VertexBinding& binding, const BoneTransforms& transforms) {
    if (binding.vertex_count() != mesh.vertices.size())
        throw std::invalid_argument("apply_pose: binding does not match mesh vertex count");
    Mesh out = mesh;
    if (binding.mode == VertexBinding::Mode::Rigid) {
        #pragma omp parallel for
        for (long i = 0; i < long(mesh.vertices.size()); ++i) {
            int b = binding.labels[i];
            Rigid skin = transforms.world[b] * transforms.inverse_bind[b];
            out.vertices[i] = skin.apply(mesh.vertices[i]);
        }
    } else {
        #pragma omp parallel for
        for (long i = 0; i < long(mesh.vertices.size()); ++i) {
            Vec3 acc{};
            for (const BoneWeight& bw : binding.weights[i]) {
                Rigid skin = transforms.world[bw.bone] * transforms.inverse_bind[bw.bone];
                acc += skin.apply(mesh.vertices[i]) * bw.weight;
            }
            out.vertices[i] = acc;
        }
    }
    recompute_normals(out);
    return out;
}

}  // namespace posegen
