#pragma once

#include <string>
#include <vector>

#include "posegen/rig.hpp"
#include "posegen/sampler.hpp"

namespace posegen {

enum class BvhChannel { Xposition, Yposition, Zposition, Xrotation, Yrotation, Zrotation };

const char* bvh_channel_name(BvhChannel c);

struct BvhJoint {
    std::string name;
    int parent = -1;
    Vec3 offset{};
    std::vector<BvhChannel> channels;  // order preserved as written
    int channel_offset = 0;            // column of this joint's first channel
    bool end_site = false;
};

/// Parsed BVH motion clip: hierarchy plus the full frame table (rotation
/// channels in degrees, as the format specifies).
struct MocapClip {
    std::vector<BvhJoint> joints;
    size_t frame_count = 0;
    double frame_time = 0;                    // seconds
    std::vector<std::vector<double>> frames;  // frame_count rows of total channel count

    int total_channels() const;
    int joint_index(const std::string& name) const;
    /// Channel value at (joint, channel, frame); throws if the joint does not
    /// carry that channel.
    double channel_value(const std::string& joint, BvhChannel channel, size_t frame) const;
};

MocapClip parse_bvh(const std::string& text);

/// Test-support writer; parse_bvh(write_bvh(clip)) is value-identical.
std::string write_bvh(const MocapClip& clip);

struct RetargetEntry {
    std::string bvh_joint;
    BvhChannel bvh_channel = BvhChannel::Xrotation;
    int theta_index = -1;
    double sign = 1.0;
    double offset_radians = 0.0;
};

/// Mapping from BVH channels onto the model's pose vector. Root channels map
/// onto root orientation (Euler alpha/beta/gamma) and translation.
struct RetargetMap {
    std::vector<RetargetEntry> entries;
    // root orientation: per Euler component, an optional source channel
    struct RootChannel {
        std::string bvh_joint;
        BvhChannel bvh_channel = BvhChannel::Xrotation;
        double sign = 1.0;
        bool present = false;
    };
    RootChannel root_orientation[3];  // alpha, beta, gamma
    RootChannel root_translation[3];  // x, y, z (BVH position units = meters here)
    double translation_scale = 1.0;
};

/// Parse a retarget-map document (JSON); DOF names resolved via the skeleton.
RetargetMap load_retarget_map(const std::string& text, const Skeleton& skeleton);

/// theta_i = clamp(sign * deg2rad(channel) + offset, bounds_i); unmapped DOFs
/// are zero. One pose per sampled frame (frame_stride >= 1).
std::vector<PoseVector> retarget(const MocapClip& clip, const RetargetMap& map,
                                 const ConstraintMatrix& constraints, size_t frame_stride = 1);

/// Single-frame variant used by the random-frame mocap mode.
PoseVector retarget_frame(const MocapClip& clip, const RetargetMap& map,
                          const ConstraintMatrix& constraints, size_t frame);

}  // namespace posegen
