#pragma once

#include <string>
#include <vector>

#include "posegen/mesh.hpp"
#include "posegen/rig.hpp"
#include "posegen/skinning.hpp"

namespace posegen {

/// Procedural test fixture: one capsule per bone of the rig, pre-labeled, so
/// the whole pipeline runs with zero external data.
struct CapsulePerson {
    Mesh mesh;
    std::vector<int> source_bone;  // generating bone per vertex
};

/// Per-bone capsule radius; kept below the occlusion epsilon so joint
/// keypoints sit within the visibility tolerance of their own surface.
double capsule_radius(const std::string& bone_name);

CapsulePerson capsule_person(const Skeleton& skeleton, int segments = 12, int cap_rings = 3);

/// Writes mesh, rig spec, binding, constraints, a few procedural background
/// images, and a ready-to-run generation config into `dir`.
void emit_demo_assets(const std::string& dir);

}  // namespace posegen
