#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "posegen/errors.hpp"
#include "posegen/bvh.hpp"

using namespace posegen;

namespace {

// two-joint chain, two frames, hand-written so every value is known
const char* kClip =
    "HIERARCHY\n"
    "ROOT Hips\n"
    "{\n"
    "  OFFSET 0.0 0.0 0.0\n"
    "  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation\n"
    "  JOINT Knee\n"
    "  {\n"
    "    OFFSET 0.0 -0.45 0.0\n"
    "    CHANNELS 3 Zrotation Xrotation Yrotation\n"
    "    End Site\n"
    "    {\n"
    "      OFFSET 0.0 -0.43 0.0\n"
    "    }\n"
    "  }\n"
    "}\n"
    "MOTION\n"
    "Frames: 2\n"
    "Frame Time: 0.04\n"
    "0.1 0.2 0.3 90 0 0 30 0 0\n"
    "1.1 1.2 1.3 -90 10 20 -30 5 15\n";

}  // namespace

TEST_CASE("hand-written 2-frame clip reads back exactly") {
    MocapClip clip = parse_bvh(kClip);
    CHECK(clip.frame_count == 2);
    CHECK(clip.frame_time == 0.04);
    CHECK(clip.total_channels() == 9);
    REQUIRE(clip.joints.size() == 3);  // Hips, Knee, Knee_End
    CHECK(clip.joints[0].name == "Hips");
    CHECK(clip.joints[1].parent == 0);
    CHECK(clip.joints[2].end_site);
    CHECK(clip.joints[1].offset.y == -0.45);

    CHECK(clip.channel_value("Hips", BvhChannel::Zrotation, 0) == 90.0);
    CHECK(clip.channel_value("Hips", BvhChannel::Xposition, 1) == 1.1);
    CHECK(clip.channel_value("Knee", BvhChannel::Zrotation, 0) == 30.0);
    CHECK(clip.channel_value("Knee", BvhChannel::Yrotation, 1) == 15.0);

    // channel ORDER as written (Z then X then Y)
    CHECK(clip.joints[1].channels ==
          std::vector<BvhChannel>{BvhChannel::Zrotation, BvhChannel::Xrotation, BvhChannel::Yrotation});
}

TEST_CASE("write-back of a parsed clip is value-identical") {
    MocapClip clip = parse_bvh(kClip);
    MocapClip back = parse_bvh(write_bvh(clip));
    CHECK(back.frame_count == clip.frame_count);
    CHECK(back.frame_time == clip.frame_time);
    REQUIRE(back.joints.size() == clip.joints.size());
    for (size_t j = 0; j < clip.joints.size(); ++j) {
        CHECK(back.joints[j].name == clip.joints[j].name);
        CHECK(back.joints[j].parent == clip.joints[j].parent);
        CHECK(back.joints[j].offset == clip.joints[j].offset);
        CHECK(back.joints[j].channels == clip.joints[j].channels);
    }
    CHECK(back.frames == clip.frames);
}

TEST_CASE("malformed BVH raises ParseError") {
    CHECK_THROWS_AS(parse_bvh(""), ParseError);
    CHECK_THROWS_AS(parse_bvh("HIERARCHY\nROOT A\n{\nOFFSET 0 0 0\nCHANNELS 1 Xrotation\n}\n"),
                    ParseError);  // missing MOTION
    // channel count does not match the declared list
    CHECK_THROWS_AS(parse_bvh("HIERARCHY\nROOT A\n{\nOFFSET 0 0 0\nCHANNELS 2 Xrotation\n}\n"
                              "MOTION\nFrames: 1\nFrame Time: 0.1\n1 2\n"),
                    ParseError);
    // unknown channel name
    CHECK_THROWS_AS(parse_bvh("HIERARCHY\nROOT A\n{\nOFFSET 0 0 0\nCHANNELS 1 Wrotation\n}\n"
                              "MOTION\nFrames: 1\nFrame Time: 0.1\n1\n"),
                    ParseError);
    // frame row too short
    CHECK_THROWS_AS(parse_bvh("HIERARCHY\nROOT A\n{\nOFFSET 0 0 0\nCHANNELS 3 Zrotation Xrotation Yrotation\n}\n"
                              "MOTION\nFrames: 2\nFrame Time: 0.1\n1 2 3\n4 5\n"),
                    ParseError);
}

TEST_CASE("channel_value rejects a channel the joint does not carry") {
    MocapClip clip = parse_bvh(kClip);
    CHECK_THROWS(clip.channel_value("Knee", BvhChannel::Xposition, 0));
    CHECK_THROWS(clip.channel_value("Nope", BvhChannel::Xrotation, 0));
}

TEST_CASE("identity map on an all-zero clip yields zero poses") {
    Skeleton s = canonical_rig();
    ConstraintMatrix cm = load_constraints(default_constraints_json(), s);
    MocapClip clip = parse_bvh(
        "HIERARCHY\nROOT Hips\n{\nOFFSET 0 0 0\nCHANNELS 3 Zrotation Xrotation Yrotation\n}\n"
        "MOTION\nFrames: 3\nFrame Time: 0.1\n0 0 0\n0 0 0\n0 0 0\n");
    RetargetMap map = load_retarget_map(
        R"({"mappings": [{"joint": "Hips", "channel": "Xrotation", "dof": "elbow_r"}]})", s);
    auto poses = retarget(clip, map, cm);
    REQUIRE(poses.size() == 3);
    for (const PoseVector& p : poses) {
        for (double t : p.theta) CHECK(t == 0.0);
        CHECK(p.root_orientation == Vec3{});
        CHECK(p.root_translation == Vec3{});
    }
}

TEST_CASE("retarget applies sign, offset, clamping, and translation scale") {
    Skeleton s = canonical_rig();
    ConstraintMatrix cm = load_constraints(default_constraints_json(), s);
    // allow root translation so the position channels can land somewhere
    ConstraintMatrix cm2 = cm;
    for (int k = 0; k < 3; ++k) cm2.root_translation[k] = {-10, 10};

    MocapClip clip = parse_bvh(kClip);
    RetargetMap map = load_retarget_map(R"({
        "mappings": [
            {"joint": "Knee", "channel": "Zrotation", "dof": "elbow_r", "sign": 1},
            {"joint": "Knee", "channel": "Xrotation", "dof": "neck_x", "sign": -1, "offset_deg": 10}
        ],
        "root_orientation": {"gamma": {"joint": "Hips", "channel": "Zrotation", "sign": 1}},
        "root_translation": {
            "x": {"joint": "Hips", "channel": "Xposition"},
            "z": {"joint": "Hips", "channel": "Yposition"}
        },
        "translation_scale": 0.01
    })", s);

    PoseVector p0 = retarget_frame(clip, map, cm2, 0);
    // elbow: 30 deg, inside [0, 145]
    CHECK(p0.theta[s.dof_index("elbow_r")] == doctest::Approx(deg2rad(30)).epsilon(1e-6));
    // neck_x: -1 * 0 + 10 deg offset
    CHECK(p0.theta[s.dof_index("neck_x")] == doctest::Approx(deg2rad(10)).epsilon(1e-6));
    // gamma: 90 deg clamped to the 30 deg upright bound
    CHECK(p0.root_orientation.z == doctest::Approx(deg2rad(30)).epsilon(1e-6));
    // translation: scaled channels, unmapped component zero
    CHECK(p0.root_translation.x == doctest::Approx(0.1 * 0.01).epsilon(1e-6));
    CHECK(p0.root_translation.z == doctest::Approx(0.2 * 0.01).epsilon(1e-6));
    CHECK(p0.root_translation.y == 0.0);

    PoseVector p1 = retarget_frame(clip, map, cm2, 1);
    // elbow: -30 deg clamped to 0
    CHECK(p1.theta[s.dof_index("elbow_r")] == 0.0);
    // neck_x: -5 + 10 = 5 deg
    CHECK(p1.theta[s.dof_index("neck_x")] == doctest::Approx(deg2rad(5)).epsilon(1e-6));
}

TEST_CASE("retarget map errors") {
    Skeleton s = canonical_rig();
    CHECK_THROWS_AS(load_retarget_map("{", s), ParseError);
    CHECK_THROWS_AS(load_retarget_map(
        R"({"mappings": [{"joint": "A", "channel": "Xrotation", "dof": "nope"}]})", s), ParseError);
    CHECK_THROWS_AS(load_retarget_map(R"({"mappings": [
        {"joint": "A", "channel": "Xrotation", "dof": "elbow_r"},
        {"joint": "B", "channel": "Yrotation", "dof": "elbow_r"}]})", s), ParseError);

    // map referencing a joint/channel the clip lacks
    ConstraintMatrix cm = load_constraints(default_constraints_json(), s);
    MocapClip clip = parse_bvh(kClip);
    RetargetMap map = load_retarget_map(
        R"({"mappings": [{"joint": "Ghost", "channel": "Xrotation", "dof": "elbow_r"}]})", s);
    CHECK_THROWS_AS(retarget(clip, map, cm), std::invalid_argument);
    RetargetMap map2 = load_retarget_map(
        R"({"mappings": [{"joint": "Knee", "channel": "Xposition", "dof": "elbow_r"}]})", s);
    CHECK_THROWS_AS(retarget_frame(clip, map2, cm, 0), std::invalid_argument);
}

TEST_CASE("frame stride subsamples the clip") {
    Skeleton s = canonical_rig();
    ConstraintMatrix cm = load_constraints(default_constraints_json(), s);
    MocapClip clip = parse_bvh(
        "HIERARCHY\nROOT A\n{\nOFFSET 0 0 0\nCHANNELS 1 Zrotation\n}\n"
        "MOTION\nFrames: 5\nFrame Time: 0.1\n10\n20\n30\n40\n50\n");
    RetargetMap map = load_retarget_map(
        R"({"mappings": [{"joint": "A", "channel": "Zrotation", "dof": "elbow_r"}]})", s);
    auto poses = retarget(clip, map, cm, 2);
    REQUIRE(poses.size() == 3);  // frames 0, 2, 4
    int e = s.dof_index("elbow_r");
    CHECK(poses[0].theta[e] == doctest::Approx(deg2rad(10)).epsilon(1e-6));
    CHECK(poses[1].theta[e] == doctest::Approx(deg2rad(30)).epsilon(1e-6));
    CHECK(poses[2].theta[e] == doctest::Approx(deg2rad(50)).epsilon(1e-6));
}
