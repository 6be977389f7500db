#pragma once

#include <string>
#include <vector>

#include "posegen/mesh.hpp"
#include "posegen/rig.hpp"

namespace posegen {

struct BoneWeight {
    int bone = -1;
    double weight = 0;
};

/// Per-vertex limb assignment: one rigid label, or up to 4 weighted bones.
struct VertexBinding {
    enum class Mode { Rigid, Blend };
    Mode mode = Mode::Rigid;
    std::vector<int> labels;                          // rigid: one bone index per vertex
    std::vector<std::vector<BoneWeight>> weights;     // blend: per-vertex weight list

    size_t vertex_count() const {
        return mode == Mode::Rigid ? labels.size() : weights.size();
    }
};

/// Label each vertex with the bone whose rest head->tail segment is nearest
/// (ties broken by bone order). Blend mode weights the 2 nearest segments by
/// 1/(d+eps)^2, renormalized.
VertexBinding auto_bind(const Mesh& mesh, const Skeleton& skeleton,
                        VertexBinding::Mode mode = VertexBinding::Mode::Rigid);

std::string binding_to_text(const VertexBinding& binding, const Skeleton& skeleton);
VertexBinding binding_from_text(const std::string& text, const Skeleton& skeleton);
void save_binding(const std::string& path, const VertexBinding& binding, const Skeleton& skeleton);
VertexBinding load_binding(const std::string& path, const Skeleton& skeleton, size_t expect_vertices);

/// Deform the mesh: rigid v' = W_b B_b^-1 v, blend v' = sum_k w_k W_k B_k^-1 v.
/// Colors pass through; normals are recomputed.
Mesh apply_pose(const Mesh& mesh, const VertexBinding& binding, const BoneTransforms& transforms);

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

}  // namespace posegen
