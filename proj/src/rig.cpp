#include "posegen/rig.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "posegen/errors.hpp"

namespace posegen {

using nlohmann::json;

int joint_dof_count(JointKind kind) {
    switch (kind) {
        case JointKind::Root: return 0;
        case JointKind::Revolute: return 1;
        case JointKind::Universal: return 2;
        case JointKind::Spherical: return 3;
    }
    return 0;
}

int Skeleton::bone_index(const std::string& name) const {
    for (size_t i = 0; i < bones.size(); ++i)
        if (bones[i].name == name) return int(i);
    return -1;
}

const Bone& Skeleton::bone(const std::string& name) const {
    int i = bone_index(name);
    if (i < 0) throw std::out_of_range("skeleton has no bone named " + name);
    return bones[i];
}

int Skeleton::dof_index(const std::string& dof_name) const {
    for (const Bone& b : bones)
        for (size_t k = 0; k < b.joint.dof_names.size(); ++k)
            if (b.joint.dof_names[k] == dof_name) return b.joint.theta_indices[k];
    return -1;
}

std::vector<std::string> Skeleton::dof_names() const {
    std::vector<std::string> names(dof_count);
    for (const Bone& b : bones)
        for (size_t k = 0; k < b.joint.dof_names.size(); ++k)
            names[b.joint.theta_indices[k]] = b.joint.dof_names[k];
    return names;
}

namespace {

Vec3 vec3_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ParseError("rig: " + where + " must be a 3-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

JointKind kind_from(const std::string& s) {
    if (s == "root") return JointKind::Root;
    if (s == "spherical") return JointKind::Spherical;
    if (s == "revolute") return JointKind::Revolute;
    if (s == "universal") return JointKind::Universal;
    throw ParseError("rig: unknown joint kind '" + s + "'");
}

void check_unit(const Vec3& a, const std::string& bone) {
    if (std::abs(norm(a) - 1.0) > 1e-9)
        throw ParseError("rig: non-unit joint axis on bone " + bone);
}

}  // namespace

Skeleton load_rig_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("rig: invalid JSON: ") + e.what());
    }
    if (!doc.contains("bones") || !doc["bones"].is_array())
        throw ParseError("rig: missing 'bones' array");

    Skeleton skel;
    std::set<std::string> names;
    for (const json& jb : doc["bones"]) {
        Bone b;
        b.name = jb.at("name").get<std::string>();
        if (!names.insert(b.name).second)
            throw ParseError("rig: duplicate bone name " + b.name);
        b.head = vec3_from(jb.at("head"), "bone " + b.name + " head");
        b.tail = vec3_from(jb.at("tail"), "bone " + b.name + " tail");

        const json& jj = jb.at("joint");
        b.joint.kind = kind_from(jj.at("kind").get<std::string>());
        int dof = joint_dof_count(b.joint.kind);
        if (dof > 0) {
            for (const json& ji : jj.at("indices")) b.joint.theta_indices.push_back(ji.get<int>());
            for (const json& jn : jj.at("dof_names")) b.joint.dof_names.push_back(jn.get<std::string>());
            if (int(b.joint.theta_indices.size()) != dof || int(b.joint.dof_names.size()) != dof)
                throw ParseError("rig: bone " + b.name + " DOF count does not match joint kind");
        }
        if (b.joint.kind == JointKind::Revolute || b.joint.kind == JointKind::Universal) {
            b.joint.axis = vec3_from(jj.at("axis"), "bone " + b.name + " axis");
            check_unit(b.joint.axis, b.name);
        }
        if (b.joint.kind == JointKind::Universal) {
            b.joint.axis2 = vec3_from(jj.at("axis2"), "bone " + b.name + " axis2");
            check_unit(b.joint.axis2, b.name);
            if (std::abs(dot(b.joint.axis, b.joint.axis2)) > 1e-9)
                throw ParseError("rig: universal joint axes not orthogonal on bone " + b.name);
        }
        skel.bones.push_back(b);
    }

    // resolve parents
    int root_count = 0;
    for (size_t i = 0; i < skel.bones.size(); ++i) {
        const json& jb = doc["bones"][i];
        if (jb.at("parent").is_null()) {
            skel.bones[i].parent = -1;
            ++root_count;
        } else {
            std::string pname = jb.at("parent").get<std::string>();
            int pi = skel.bone_index(pname);
            if (pi < 0) throw ParseError("rig: bone " + skel.bones[i].name + " has unknown parent " + pname);
            skel.bones[i].parent = pi;
        }
    }
    if (root_count != 1) throw ParseError("rig: expected exactly one root bone");

    // cycle check: every parent chain must terminate within bone count steps
    for (size_t i = 0; i < skel.bones.size(); ++i) {
        int cur = int(i);
        for (size_t steps = 0; cur >= 0; ++steps) {
            if (steps > skel.bones.size())
                throw ParseError("rig: cycle in parent graph at bone " + skel.bones[i].name);
            cur = skel.bones[cur].parent;
        }
    }

    // theta indices must partition 0..n-1
    std::vector<int> all;
    for (const Bone& b : skel.bones)
        all.insert(all.end(), b.joint.theta_indices.begin(), b.joint.theta_indices.end());
    skel.dof_count = int(all.size());
    std::vector<bool> seen(all.size(), false);
    for (int idx : all) {
        if (idx < 0 || idx >= skel.dof_count || seen[idx])
            throw ParseError("rig: joint DOF indices do not partition 0.." + std::to_string(skel.dof_count - 1));
        seen[idx] = true;
    }
    return skel;
}

std::string canonical_rig_json() {
    // T-pose, right-handed Z-up world, subject facing +X, left side at +Y.
    // Theta index order: neck(0-2), R shoulder(3-5), R elbow(6), R wrist(7-8),
    // L shoulder(9-11), L elbow(12), L wrist(13-14), R hip(15-17), R knee(18),
    // R ankle(19-20), L hip(21-23), L knee(24), L ankle(25-26).
    return R"({
  "bones": [
    {"name": "T",   "parent": null,  "head": [0, 0, 1.0],     "tail": [0, 0, 1.45],
     "joint": {"kind": "root"}},
    {"name": "H",   "parent": "T",   "head": [0, 0, 1.45],    "tail": [0, 0, 1.72],
     "joint": {"kind": "spherical", "indices": [0, 1, 2], "dof_names": ["neck_x", "neck_y", "neck_z"]}},
    {"name": "RUA", "parent": "T",   "head": [0, -0.20, 1.40], "tail": [0, -0.50, 1.40],
     "joint": {"kind": "spherical", "indices": [3, 4, 5], "dof_names": ["shoulder_r_x", "shoulder_r_y", "shoulder_r_z"]}},
    {"name": "RLA", "parent": "RUA", "head": [0, -0.50, 1.40], "tail": [0, -0.78, 1.40],
     "joint": {"kind": "revolute", "indices": [6], "dof_names": ["elbow_r"], "axis": [0, 0, 1]}},
    {"name": "RP",  "parent": "RLA", "head": [0, -0.78, 1.40], "tail": [0, -0.88, 1.40],
     "joint": {"kind": "universal", "indices": [7, 8], "dof_names": ["wrist_r_a", "wrist_r_b"], "axis": [0, 0, 1], "axis2": [1, 0, 0]}},
    {"name": "LUA", "parent": "T",   "head": [0, 0.20, 1.40],  "tail": [0, 0.50, 1.40],
     "joint": {"kind": "spherical", "indices": [9, 10, 11], "dof_names": ["shoulder_l_x", "shoulder_l_y", "shoulder_l_z"]}},
    {"name": "LLA", "parent": "LUA", "head": [0, 0.50, 1.40],  "tail": [0, 0.78, 1.40],
     "joint": {"kind": "revolute", "indices": [12], "dof_names": ["elbow_l"], "axis": [0, 0, -1]}},
    {"name": "LP",  "parent": "LLA", "head": [0, 0.78, 1.40],  "tail": [0, 0.88, 1.40],
     "joint": {"kind": "universal", "indices": [13, 14], "dof_names": ["wrist_l_a", "wrist_l_b"], "axis": [0, 0, 1], "axis2": [1, 0, 0]}},
    {"name": "RUL", "parent": "T",   "head": [0, -0.10, 1.00], "tail": [0, -0.10, 0.55],
     "joint": {"kind": "spherical", "indices": [15, 16, 17], "dof_names": ["hip_r_x", "hip_r_y", "hip_r_z"]}},
    {"name": "RLL", "parent": "RUL", "head": [0, -0.10, 0.55], "tail": [0, -0.10, 0.12],
     "joint": {"kind": "revolute", "indices": [18], "dof_names": ["knee_r"], "axis": [0, 1, 0]}},
    {"name": "RF",  "parent": "RLL", "head": [0, -0.10, 0.12], "tail": [0.18, -0.10, 0.05],
     "joint": {"kind": "universal", "indices": [19, 20], "dof_names": ["ankle_r_a", "ankle_r_b"], "axis": [0, 1, 0], "axis2": [1, 0, 0]}},
    {"name": "LUL", "parent": "T",   "head": [0, 0.10, 1.00],  "tail": [0, 0.10, 0.55],
     "joint": {"kind": "spherical", "indices": [21, 22, 23], "dof_names": ["hip_l_x", "hip_l_y", "hip_l_z"]}},
    {"name": "LLL", "parent": "LUL", "head": [0, 0.10, 0.55],  "tail": [0, 0.10, 0.12],
     "joint": {"kind": "revolute", "indices": [24], "dof_names": ["knee_l"], "axis": [0, 1, 0]}},
    {"name": "LF",  "parent": "LLL", "head": [0, 0.10, 0.12],  "tail": [0.18, 0.10, 0.05],
     "joint": {"kind": "universal", "indices": [25, 26], "dof_names": ["ankle_l_a", "ankle_l_b"], "axis": [0, 1, 0], "axis2": [1, 0, 0]}}
  ]
})";
}

Skeleton canonical_rig() { return load_rig_spec(canonical_rig_json()); }

Mat3 joint_rotation(const JointSpec& joint, const std::vector<double>& angles) {
    if (int(angles.size()) != joint_dof_count(joint.kind))
        throw std::invalid_argument("joint_rotation: wrong angle count");
    switch (joint.kind) {
        case JointKind::Root:
            return Mat3::identity();
        case JointKind::Revolute:
            return axis_angle(joint.axis, angles[0]);
        case JointKind::Universal:
            // successive intrinsic rotations: axis first, then axis2
            return axis_angle(joint.axis, angles[0]) * axis_angle(joint.axis2, angles[1]);
        case JointKind::Spherical:
            return euler_to_rotation(angles[0], angles[1], angles[2]);
    }
    return Mat3::identity();
}

namespace {

std::vector<Rigid> world_transforms(const Skeleton& skel, const PoseVector& pose) {
    std::vector<Rigid> world(skel.bones.size());
    std::vector<bool> done(skel.bones.size(), false);
    size_t remaining = skel.bones.size();
    while (remaining > 0) {
        size_t before = remaining;
        for (size_t i = 0; i < skel.bones.size(); ++i) {
            if (done[i]) continue;
            const Bone& b = skel.bones[i];
            if (b.parent >= 0 && !done[b.parent]) continue;
            std::vector<double> angles;
            for (int idx : b.joint.theta_indices) angles.push_back(pose.theta[idx]);
            Mat3 joint_rot = joint_rotation(b.joint, angles);
            if (b.parent < 0) {
                Mat3 root_rot = euler_to_rotation(pose.root_orientation.x, pose.root_orientation.y,
                                                  pose.root_orientation.z);
                world[i] = Rigid::translation(pose.root_translation) * Rigid::translation(b.head) *
                           Rigid::rotation(root_rot) * Rigid::rotation(joint_rot);
            } else {
                Vec3 offset = b.head - skel.bones[b.parent].head;
                world[i] = world[b.parent] * Rigid::translation(offset) * Rigid::rotation(joint_rot);
            }
            done[i] = true;
            --remaining;
        }
        if (remaining == before)
            throw std::invalid_argument("forward_kinematics: unresolved parent graph");
    }
    return world;
}

}  // namespace

BoneTransforms forward_kinematics(const Skeleton& skeleton, const PoseVector& pose) {
    if (int(pose.theta.size()) != skeleton.dof_count)
        throw std::invalid_argument("forward_kinematics: pose length != skeleton dof_count");
    BoneTransforms out;
    out.world = world_transforms(skeleton, pose);
    std::vector<Rigid> rest = world_transforms(skeleton, PoseVector::zeros(skeleton));
    out.inverse_bind.reserve(rest.size());
    for (const Rigid& r : rest) out.inverse_bind.push_back(r.inverse());
    return out;
}

const char* keypoint_name(Keypoint k) {
    static const char* names[kKeypointCount] = {
        "head_top", "neck",
        "shoulder_l", "shoulder_r", "elbow_l", "elbow_r", "wrist_l", "wrist_r",
        "hip_l", "hip_r", "knee_l", "knee_r", "ankle_l", "ankle_r",
    };
    return names[int(k)];
}

std::optional<Keypoint> keypoint_from_name(const std::string& name) {
    for (int i = 0; i < kKeypointCount; ++i)
        if (name == keypoint_name(Keypoint(i))) return Keypoint(i);
    return std::nullopt;
}

std::array<Vec3, kKeypointCount> joint_world_positions(const Skeleton& skeleton,
                                                       const BoneTransforms& transforms) {
    auto head_of = [&](const char* bone) {
        int i = skeleton.bone_index(bone);
        if (i < 0) throw std::invalid_argument(std::string("rig is missing canonical bone ") + bone);
        // world transform maps the bone-local origin (= joint head) to world
        return transforms.world[i].apply({0, 0, 0});
    };
    auto tail_of = [&](const char* bone) {
        int i = skeleton.bone_index(bone);
        if (i < 0) throw std::invalid_argument(std::string("rig is missing canonical bone ") + bone);
        const Bone& b = skeleton.bones[i];
        return transforms.world[i].apply(b.tail - b.head);
    };
    return {
        tail_of("H"), head_of("H"),
        head_of("LUA"), head_of("RUA"), head_of("LLA"), head_of("RLA"), head_of("LP"), head_of("RP"),
        head_of("LUL"), head_of("RUL"), head_of("LLL"), head_of("RLL"), head_of("LF"), head_of("RF"),
    };
}

}  // namespace posegen
