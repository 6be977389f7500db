#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "posegen/math.hpp"

namespace posegen {

enum class JointKind { Root, Spherical, Revolute, Universal };

int joint_dof_count(JointKind kind);

struct JointSpec {
    JointKind kind = JointKind::Root;
    std::vector<int> theta_indices;      // size == DOF count
    std::vector<std::string> dof_names;  // size == DOF count
    Vec3 axis{};                         // revolute
    Vec3 axis2{};                        // universal second axis
};

struct Bone {
    std::string name;    // H, T, LUA, LLA, LP, RUA, RLA, RP, LUL, LLL, LF, RUL, RLL, RF
    int parent = -1;     // index into Skeleton::bones, -1 for root
    Vec3 head{};         // rest-pose joint position
    Vec3 tail{};         // rest-pose end of the bone segment
    JointSpec joint;
};

struct Skeleton {
    std::vector<Bone> bones;
    int dof_count = 0;

    int bone_index(const std::string& name) const;
    const Bone& bone(const std::string& name) const;
    /// theta index for a DOF name, -1 if unknown.
    int dof_index(const std::string& dof_name) const;
    std::vector<std::string> dof_names() const;  // ordered by theta index
};

struct PoseVector {
    std::vector<double> theta;  // radians, skeleton.dof_count entries
    Vec3 root_orientation{};    // Euler (alpha, beta, gamma), radians
    Vec3 root_translation{};    // meters

    static PoseVector zeros(const Skeleton& s) {
        return {std::vector<double>(s.dof_count, 0.0), {}, {}};
    }
};

struct BoneTransforms {
    std::vector<Rigid> world;         // per bone
    std::vector<Rigid> inverse_bind;  // per bone, from the all-zeros pose
};

/// Parse and validate a rig-spec document (JSON). Throws ParseError on
/// cycles, non-partition DOF indices, non-unit or non-orthogonal axes.
Skeleton load_rig_spec(const std::string& text);

/// The bundled canonical 27-DOF, 14-bone human rig (T-pose, Z-up, facing +X).
Skeleton canonical_rig();
std::string canonical_rig_json();

Mat3 joint_rotation(const JointSpec& joint, const std::vector<double>& angles);

BoneTransforms forward_kinematics(const Skeleton& skeleton, const PoseVector& pose);

/// The 14 annotation keypoints, in this fixed order.
enum class Keypoint {
    HeadTop, Neck,
    ShoulderL, ShoulderR, ElbowL, ElbowR, WristL, WristR,
    HipL, HipR, KneeL, KneeR, AnkleL, AnkleR,
};
constexpr int kKeypointCount = 14;
const char* keypoint_name(Keypoint k);
std::optional<Keypoint> keypoint_from_name(const std::string& name);

std::array<Vec3, kKeypointCount> joint_world_positions(const Skeleton& skeleton,
                                                       const BoneTransforms& transforms);

}  // namespace posegen
