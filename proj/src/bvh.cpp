#include "posegen/bvh.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "posegen/errors.hpp"
#include "posegen/floatfmt.hpp"

namespace posegen {

using nlohmann::json;

const char* bvh_channel_name(BvhChannel c) {
    switch (c) {
        case BvhChannel::Xposition: return "Xposition";
        case BvhChannel::Yposition: return "Yposition";
        case BvhChannel::Zposition: return "Zposition";
        case BvhChannel::Xrotation: return "Xrotation";
        case BvhChannel::Yrotation: return "Yrotation";
        case BvhChannel::Zrotation: return "Zrotation";
    }
    return "?";
}

namespace {

BvhChannel channel_from(const std::string& s) {
    for (int i = 0; i < 6; ++i)
        if (s == bvh_channel_name(BvhChannel(i))) return BvhChannel(i);
    throw ParseError("bvh: unknown channel token '" + s + "'");
}

class Tokenizer {
public:
    explicit Tokenizer(const std::string& text) : in_(text) {}

    std::string next() {
        std::string tok;
        if (!(in_ >> tok)) throw ParseError("bvh: unexpected end of input");
        return tok;
    }

    bool peek_end() {
        return !(in_ >> std::ws) || in_.eof();
    }

    std::istringstream& stream() { return in_; }

private:
    std::istringstream in_;
};

double expect_number(const std::string& tok, const std::string& context) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError("bvh: malformed number '" + tok + "' in " + context);
    return v;
}

}  // namespace

int MocapClip::total_channels() const {
    int n = 0;
    for (const BvhJoint& j : joints) n += int(j.channels.size());
    return n;
}

int MocapClip::joint_index(const std::string& name) const {
    for (size_t i = 0; i < joints.size(); ++i)
        if (joints[i].name == name) return int(i);
    return -1;
}

double MocapClip::channel_value(const std::string& joint, BvhChannel channel, size_t frame) const {
    int ji = joint_index(joint);
    if (ji < 0) throw std::out_of_range("bvh clip has no joint named " + joint);
    const BvhJoint& j = joints[ji];
    for (size_t c = 0; c < j.channels.size(); ++c)
        if (j.channels[c] == channel)
            return frames.at(frame)[j.channel_offset + c];
    throw std::out_of_range("bvh joint " + joint + " has no channel " +
                            bvh_channel_name(channel));
}

MocapClip parse_bvh(const std::string& text) {
    Tokenizer tok(text);
    if (tok.next() != "HIERARCHY") throw ParseError("bvh: missing HIERARCHY section");

    MocapClip clip;
    int channel_cursor = 0;

    // recursive descent over ROOT/JOINT/End Site blocks
    std::function<void(int, bool)> parse_joint = [&](int parent, bool end_site) {
        BvhJoint joint;
        joint.parent = parent;
        joint.end_site = end_site;
        if (end_site) {
            std::string site = tok.next();  // "Site"
            if (site != "Site") throw ParseError("bvh: expected 'Site' after 'End'");
            joint.name = (parent >= 0 ? clip.joints[parent].name : std::string("root")) + "_End";
        } else {
            joint.name = tok.next();
        }
        if (tok.next() != "{") throw ParseError("bvh: expected '{' after joint " + joint.name);
        int self = int(clip.joints.size());
        clip.joints.push_back(joint);

        for (;;) {
            std::string kw = tok.next();
            if (kw == "}") break;
            if (kw == "OFFSET") {
                Vec3 off;
                off.x = expect_number(tok.next(), "OFFSET of " + joint.name);
                off.y = expect_number(tok.next(), "OFFSET of " + joint.name);
                off.z = expect_number(tok.next(), "OFFSET of " + joint.name);
                clip.joints[self].offset = off;
            } else if (kw == "CHANNELS") {
                int n = int(expect_number(tok.next(), "CHANNELS of " + joint.name));
                clip.joints[self].channel_offset = channel_cursor;
                for (int i = 0; i < n; ++i)
                    clip.joints[self].channels.push_back(channel_from(tok.next()));
                channel_cursor += n;
            } else if (kw == "JOINT") {
                parse_joint(self, false);
            } else if (kw == "End") {
                parse_joint(self, true);
            } else {
                throw ParseError("bvh: unexpected token '" + kw + "' in joint " + joint.name);
            }
        }
    };

    std::string kw = tok.next();
    if (kw != "ROOT") throw ParseError("bvh: expected ROOT, got '" + kw + "'");
    parse_joint(-1, false);

    if (tok.next() != "MOTION") throw ParseError("bvh: missing MOTION section");
    std::string frames_kw = tok.next();
    if (frames_kw != "Frames:") throw ParseError("bvh: expected 'Frames:', got '" + frames_kw + "'");
    long frame_count = long(expect_number(tok.next(), "Frames"));
    if (frame_count < 0) throw ParseError("bvh: negative frame count");
    std::string ft1 = tok.next(), ft2 = tok.next();
    if (ft1 != "Frame" || ft2 != "Time:") throw ParseError("bvh: expected 'Frame Time:'");
    clip.frame_time = expect_number(tok.next(), "Frame Time");
    if (clip.frame_time <= 0) throw ParseError("bvh: frame time must be positive");

    int ncols = clip.total_channels();
    clip.frame_count = size_t(frame_count);
    clip.frames.reserve(clip.frame_count);
    // frame rows are newline-delimited, but whitespace tokenizing is
    // equivalent as long as every row has exactly ncols values
    for (long f = 0; f < frame_count; ++f) {
        std::vector<double> row(ncols);
        for (int c = 0; c < ncols; ++c) {
            std::string t;
            if (!(tok.stream() >> t))
                throw ParseError("bvh: frame row " + std::to_string(f) + " is missing values (expected " +
                                 std::to_string(ncols) + " channels)");
            row[c] = expect_number(t, "frame row " + std::to_string(f));
        }
        clip.frames.push_back(std::move(row));
    }
    std::string extra;
    if (tok.stream() >> extra)
        throw ParseError("bvh: trailing data after the last frame row (channel-count mismatch?)");
    return clip;
}

std::string write_bvh(const MocapClip& clip) {
    std::ostringstream os;
    os.precision(17);
    os << "HIERARCHY\n";
    std::function<void(int, int)> emit = [&](int ji, int depth) {
        const BvhJoint& j = clip.joints[ji];
        std::string ind(depth * 2, ' ');
        if (j.end_site) os << ind << "End Site\n";
        else os << ind << (j.parent < 0 ? "ROOT " : "JOINT ") << j.name << "\n";
        os << ind << "{\n";
        os << ind << "  OFFSET " << j.offset.x << " " << j.offset.y << " " << j.offset.z << "\n";
        if (!j.channels.empty()) {
            os << ind << "  CHANNELS " << j.channels.size();
            for (BvhChannel c : j.channels) os << " " << bvh_channel_name(c);
            os << "\n";
        }
        for (size_t k = 0; k < clip.joints.size(); ++k)
            if (clip.joints[k].parent == ji) emit(int(k), depth + 1);
        os << ind << "}\n";
    };
    emit(0, 0);
    os << "MOTION\n";
    os << "Frames: " << clip.frame_count << "\n";
    os << "Frame Time: " << clip.frame_time << "\n";
    for (const auto& row : clip.frames) {
        for (size_t c = 0; c < row.size(); ++c) os << (c ? " " : "") << row[c];
        os << "\n";
    }
    return os.str();
}

RetargetMap load_retarget_map(const std::string& text, const Skeleton& skeleton) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("retarget map: invalid JSON: ") + e.what());
    }
    RetargetMap map;
    std::vector<bool> mapped(skeleton.dof_count, false);
    if (doc.contains("mappings")) {
        for (const json& jm : doc["mappings"]) {
            RetargetEntry e;
            e.bvh_joint = jm.at("joint").get<std::string>();
            e.bvh_channel = channel_from(jm.at("channel").get<std::string>());
            std::string dof = jm.at("dof").get<std::string>();
            e.theta_index = skeleton.dof_index(dof);
            if (e.theta_index < 0)
                throw ParseError("retarget map: unknown DOF name '" + dof + "'");
            if (mapped[e.theta_index])
                throw ParseError("retarget map: DOF '" + dof + "' mapped more than once");
            mapped[e.theta_index] = true;
            if (jm.contains("sign")) e.sign = jm["sign"].get<double>();
            if (jm.contains("offset_deg")) e.offset_radians = deg2rad(jm["offset_deg"].get<double>());
            map.entries.push_back(e);
        }
    }
    auto load_root = [&](const char* key, RetargetMap::RootChannel* dst, const char* const comps[3]) {
        if (!doc.contains(key)) return;
        for (int k = 0; k < 3; ++k) {
            if (!doc[key].contains(comps[k])) continue;
            const json& jr = doc[key][comps[k]];
            dst[k].bvh_joint = jr.at("joint").get<std::string>();
            dst[k].bvh_channel = channel_from(jr.at("channel").get<std::string>());
            if (jr.contains("sign")) dst[k].sign = jr["sign"].get<double>();
            dst[k].present = true;
        }
    };
    static const char* const euler_comps[3] = {"alpha", "beta", "gamma"};
    static const char* const trans_comps[3] = {"x", "y", "z"};
    load_root("root_orientation", map.root_orientation, euler_comps);
    load_root("root_translation", map.root_translation, trans_comps);
    if (doc.contains("translation_scale")) map.translation_scale = doc["translation_scale"].get<double>();
    return map;
}

namespace {

void check_map_against_clip(const MocapClip& clip, const RetargetMap& map) {
    auto check = [&](const std::string& joint, BvhChannel channel) {
        int ji = clip.joint_index(joint);
        if (ji < 0) throw std::invalid_argument("retarget: clip has no joint '" + joint + "'");
        for (BvhChannel c : clip.joints[ji].channels)
            if (c == channel) return;
        throw std::invalid_argument("retarget: joint '" + joint + "' has no channel " +
                                    bvh_channel_name(channel));
    };
    for (const RetargetEntry& e : map.entries) check(e.bvh_joint, e.bvh_channel);
    for (int k = 0; k < 3; ++k) {
        if (map.root_orientation[k].present)
            check(map.root_orientation[k].bvh_joint, map.root_orientation[k].bvh_channel);
        if (map.root_translation[k].present)
            check(map.root_translation[k].bvh_joint, map.root_translation[k].bvh_channel);
    }
}

}  // namespace

PoseVector retarget_frame(const MocapClip& clip, const RetargetMap& map,
                          const ConstraintMatrix& constraints, size_t frame) {
    check_map_against_clip(clip, map);
    PoseVector pose;
    pose.theta.assign(constraints.dof.size(), 0.0);
    for (const RetargetEntry& e : map.entries) {
        double v = e.sign * deg2rad(clip.channel_value(e.bvh_joint, e.bvh_channel, frame)) +
                   e.offset_radians;
        pose.theta[e.theta_index] = quantize_f32(v);
    }
    double* ori = &pose.root_orientation.x;
    double* tr = &pose.root_translation.x;
    for (int k = 0; k < 3; ++k) {
        if (map.root_orientation[k].present)
            ori[k] = quantize_f32(map.root_orientation[k].sign *
                                  deg2rad(clip.channel_value(map.root_orientation[k].bvh_joint,
                                                             map.root_orientation[k].bvh_channel, frame)));
        if (map.root_translation[k].present)
            tr[k] = quantize_f32(map.root_translation[k].sign * map.translation_scale *
                                 clip.channel_value(map.root_translation[k].bvh_joint,
                                                    map.root_translation[k].bvh_channel, frame));
    }
    constraints.clamp(pose);
    return pose;
}

std::vector<PoseVector> retarget(const MocapClip& clip, const RetargetMap& map,
                                 const ConstraintMatrix& constraints, size_t frame_stride) {
    if (frame_stride == 0) throw std::invalid_argument("retarget: frame_stride must be >= 1");
    std::vector<PoseVector> out;
    for (size_t f = 0; f < clip.frame_count; f += frame_stride)
        out.push_back(retarget_frame(clip, map, constraints, f));
    return out;
}

}  // namespace posegen
