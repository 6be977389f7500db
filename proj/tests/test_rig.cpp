#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "posegen/errors.hpp"
#include "posegen/rig.hpp"
#include "posegen/rng.hpp"

using namespace posegen;
using nlohmann::json;

namespace {

PoseVector random_pose(const Skeleton& s, Rng& rng) {
    PoseVector p = PoseVector::zeros(s);
    for (double& t : p.theta) t = rng.uniform(-kPi, kPi);
    p.root_orientation = {rng.uniform(-kPi, kPi), rng.uniform(-1.5, 1.5), rng.uniform(-kPi, kPi)};
    p.root_translation = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    return p;
}

}  // namespace

TEST_CASE("canonical rig: 14 bones, 27 DOFs, T-pose landmarks") {
    Skeleton s = canonical_rig();
    CHECK(s.bones.size() == 14);
    CHECK(s.dof_count == 27);
    CHECK(s.bone("T").parent == -1);
    // left arm extends along +y, right along -y
    CHECK(s.bone("LP").head.y > 0.7);
    CHECK(s.bone("RP").head.y < -0.7);
    // every DOF name resolves and the set partitions [0, 27)
    std::vector<std::string> names = s.dof_names();
    REQUIRE(names.size() == 27);
    for (int i = 0; i < 27; ++i) CHECK(s.dof_index(names[i]) == i);
}

TEST_CASE("zero pose: world transforms equal the bind pose") {
    Skeleton s = canonical_rig();
    BoneTransforms t = forward_kinematics(s, PoseVector::zeros(s));
    for (size_t b = 0; b < s.bones.size(); ++b) {
        // skinning transform W * B^-1 must be the identity
        Rigid skin = t.world[b] * t.inverse_bind[b];
        CHECK(orthonormality_error(skin.rot) < 1e-9);
        CHECK(norm(skin.trans) < 1e-9);
        CHECK(norm(skin.rot * Vec3{1, 1, 1} - Vec3{1, 1, 1}) < 1e-9);
        // and the bone sits at its rest head
        CHECK(norm(t.world[b].apply({0, 0, 0}) - s.bones[b].head) < 1e-12);
    }
}

TEST_CASE("bone lengths are invariant under 10000 random poses") {
    Skeleton s = canonical_rig();
    Rng rng(31337);
    for (int i = 0; i < 10000; ++i) {
        PoseVector p = random_pose(s, rng);
        BoneTransforms t = forward_kinematics(s, p);
        for (size_t b = 0; b < s.bones.size(); ++b) {
            const Bone& bone = s.bones[b];
            double rest = norm(bone.tail - bone.head);
            Vec3 head = t.world[b].apply({0, 0, 0});
            Vec3 tail = t.world[b].apply(bone.tail - bone.head);
            CHECK(std::abs(norm(tail - head) - rest) / rest < 1e-9);
            CHECK(orthonormality_error(t.world[b].rot) < 1e-9);
            CHECK(t.world[b].rot.determinant() > 0);
        }
    }
}

TEST_CASE("root orientation acts as a global rotation about the root joint") {
    Skeleton s = canonical_rig();
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        PoseVector p = random_pose(s, rng);
        PoseVector p0 = p;
        p0.root_orientation = {};
        auto kp = joint_world_positions(s, forward_kinematics(s, p));
        auto kp0 = joint_world_positions(s, forward_kinematics(s, p0));
        Mat3 g = euler_to_rotation(p.root_orientation.x, p.root_orientation.y,
                                   p.root_orientation.z);
        Vec3 pivot = s.bone("T").head + p.root_translation;
        for (int k = 0; k < kKeypointCount; ++k)
            CHECK(norm(kp[k] - (pivot + g * (kp0[k] - pivot))) < 1e-9);
    }
}

TEST_CASE("revolute elbow matches a hand-computed rotation about its axis") {
    Skeleton s = canonical_rig();
    PoseVector p = PoseVector::zeros(s);
    double theta = deg2rad(90);
    p.theta[s.dof_index("elbow_r")] = theta;
    auto kp = joint_world_positions(s, forward_kinematics(s, p));
    // in T-pose the elbow axis (0,0,1) is already in world coordinates
    Vec3 elbow = s.bone("RLA").head;
    Vec3 wrist_rest = s.bone("RP").head;
    Vec3 expect = elbow + axis_angle({0, 0, 1}, theta) * (wrist_rest - elbow);
    CHECK(norm(kp[int(Keypoint::WristR)] - expect) < 1e-12);
    // +90 deg flexes the right forearm forward (+x)
    CHECK(kp[int(Keypoint::WristR)].x > 0.2);
}

TEST_CASE("universal wrist composes its two axis rotations in order") {
    Skeleton s = canonical_rig();
    const Bone& rp = s.bone("RP");
    Mat3 r = joint_rotation(rp.joint, {0.4, -0.7});
    Mat3 expect = axis_angle(rp.joint.axis, 0.4) * axis_angle(rp.joint.axis2, -0.7);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(r.m[i][j] == expect.m[i][j]);
}

TEST_CASE("keypoint names round-trip; head_top is the H bone tail") {
    for (int k = 0; k < kKeypointCount; ++k) {
        auto back = keypoint_from_name(keypoint_name(Keypoint(k)));
        REQUIRE(back.has_value());
        CHECK(int(*back) == k);
    }
    CHECK_FALSE(keypoint_from_name("nose").has_value());

    Skeleton s = canonical_rig();
    auto kp = joint_world_positions(s, forward_kinematics(s, PoseVector::zeros(s)));
    CHECK(norm(kp[int(Keypoint::HeadTop)] - s.bone("H").tail) < 1e-12);
    CHECK(norm(kp[int(Keypoint::Neck)] - s.bone("H").head) < 1e-12);
    CHECK(norm(kp[int(Keypoint::AnkleL)] - s.bone("LF").head) < 1e-12);
}

TEST_CASE("rig loader rejects malformed specs") {
    json rig = json::parse(canonical_rig_json());

    json cycle = rig;
    cycle["bones"][1]["parent"] = "H";  // self-parent
    CHECK_THROWS_AS(load_rig_spec(cycle.dump()), ParseError);

    json two_roots = rig;
    two_roots["bones"][1]["parent"] = nullptr;
    CHECK_THROWS_AS(load_rig_spec(two_roots.dump()), ParseError);

    json dup = rig;
    dup["bones"][1]["name"] = "T";
    CHECK_THROWS_AS(load_rig_spec(dup.dump()), ParseError);

    json bad_partition = rig;
    bad_partition["bones"][1]["joint"]["indices"] = {0, 1, 1};
    CHECK_THROWS_AS(load_rig_spec(bad_partition.dump()), ParseError);

    json bad_axis = rig;
    bad_axis["bones"][3]["joint"]["axis"] = {0, 0, 2};
    CHECK_THROWS_AS(load_rig_spec(bad_axis.dump()), ParseError);

    json skew_universal = rig;
    skew_universal["bones"][4]["joint"]["axis2"] = {0, 0, 1};  // parallel to axis
    CHECK_THROWS_AS(load_rig_spec(skew_universal.dump()), ParseError);

    json unknown_parent = rig;
    unknown_parent["bones"][1]["parent"] = "NOPE";
    CHECK_THROWS_AS(load_rig_spec(unknown_parent.dump()), ParseError);

    CHECK_THROWS_AS(load_rig_spec("{"), ParseError);
}

TEST_CASE("forward_kinematics validates the pose vector size") {
    Skeleton s = canonical_rig();
    PoseVector p;
    p.theta.resize(5);
    CHECK_THROWS_AS(forward_kinematics(s, p), std::invalid_argument);
}
