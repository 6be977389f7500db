#include "posegen/sampler.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "posegen/errors.hpp"
#include "posegen/floatfmt.hpp"

namespace posegen {

using nlohmann::json;

bool ConstraintMatrix::satisfied_by(const PoseVector& pose, double tol) const {
    for (size_t i = 0; i < dof.size(); ++i)
        if (pose.theta[i] < dof[i].lo - tol || pose.theta[i] > dof[i].hi + tol) return false;
    const double* ori = &pose.root_orientation.x;
    const double* tr = &pose.root_translation.x;
    for (int k = 0; k < 3; ++k) {
        if (ori[k] < root_orientation[k].lo - tol || ori[k] > root_orientation[k].hi + tol) return false;
        if (tr[k] < root_translation[k].lo - tol || tr[k] > root_translation[k].hi + tol) return false;
    }
    return true;
}

void ConstraintMatrix::clamp(PoseVector& pose) const {
    for (size_t i = 0; i < dof.size(); ++i)
        pose.theta[i] = std::clamp(pose.theta[i], dof[i].lo, dof[i].hi);
    double* ori = &pose.root_orientation.x;
    double* tr = &pose.root_translation.x;
    for (int k = 0; k < 3; ++k) {
        ori[k] = std::clamp(ori[k], root_orientation[k].lo, root_orientation[k].hi);
        tr[k] = std::clamp(tr[k], root_translation[k].lo, root_translation[k].hi);
    }
}

namespace {

Bounds bounds_from_deg(const json& j, const std::string& name) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("constraints: '" + name + "' must be [low, high]");
    Bounds b{deg2rad(j[0].get<double>()), deg2rad(j[1].get<double>())};
    if (!(std::isfinite(b.lo) && std::isfinite(b.hi)))
        throw ParseError("constraints: non-finite bounds for " + name);
    if (b.lo > b.hi)
        throw ParseError("constraints: inverted bounds for " + name);
    return b;
}

}  // namespace

ConstraintMatrix load_constraints(const std::string& text, const Skeleton& skeleton) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("constraints: invalid JSON: ") + e.what());
    }

    Bounds def{deg2rad(-90), deg2rad(90)};
    if (doc.contains("default_deg")) def = bounds_from_deg(doc["default_deg"], "default_deg");

    ConstraintMatrix cm;
    cm.dof.assign(skeleton.dof_count, def);
    if (doc.contains("dofs")) {
        for (auto& [name, range] : doc["dofs"].items()) {
            int idx = skeleton.dof_index(name);
            if (idx < 0) throw ParseError("constraints: unknown DOF name '" + name + "'");
            cm.dof[idx] = bounds_from_deg(range, name);
        }
    }
    const char* euler_names[3] = {"alpha", "beta", "gamma"};
    for (int k = 0; k < 3; ++k) cm.root_orientation[k] = {deg2rad(-180), deg2rad(180)};
    if (doc.contains("root_orientation_deg")) {
        for (int k = 0; k < 3; ++k)
            if (doc["root_orientation_deg"].contains(euler_names[k]))
                cm.root_orientation[k] = bounds_from_deg(doc["root_orientation_deg"][euler_names[k]],
                                                         euler_names[k]);
    }
    if (doc.contains("root_translation")) {
        const json& jt = doc["root_translation"];
        if (!jt.is_array() || jt.size() != 3)
            throw ParseError("constraints: root_translation must be 3 [low, high] pairs");
        for (int k = 0; k < 3; ++k) {
            double lo = jt[k][0].get<double>(), hi = jt[k][1].get<double>();
            if (lo > hi) throw ParseError("constraints: inverted root_translation bounds");
            cm.root_translation[k] = {lo, hi};
        }
    }
    return cm;
}

std::string default_constraints_json() {
    // "upright" profile: torso close to vertical, moderate joint play,
    // anatomical elbow/knee flexion ranges.
    return R"({
  "default_deg": [-40, 40],
  "dofs": {
    "neck_x": [-30, 30], "neck_y": [-30, 30], "neck_z": [-45, 45],
    "shoulder_r_x": [-60, 60], "shoulder_r_y": [-60, 60], "shoulder_r_z": [-120, 45],
    "shoulder_l_x": [-60, 60], "shoulder_l_y": [-60, 60], "shoulder_l_z": [-45, 120],
    "elbow_r": [0, 145], "elbow_l": [0, 145],
    "wrist_r_a": [-60, 60], "wrist_r_b": [-30, 30],
    "wrist_l_a": [-60, 60], "wrist_l_b": [-30, 30],
    "hip_r_x": [-40, 40], "hip_r_y": [-70, 30], "hip_r_z": [-30, 30],
    "hip_l_x": [-40, 40], "hip_l_y": [-70, 30], "hip_l_z": [-30, 30],
    "knee_r": [0, 140], "knee_l": [0, 140],
    "ankle_r_a": [-30, 30], "ankle_r_b": [-20, 20],
    "ankle_l_a": [-30, 30], "ankle_l_b": [-20, 20]
  },
  "root_orientation_deg": {"alpha": [-30, 30], "beta": [-180, 180], "gamma": [-30, 30]},
  "root_translation": [[0, 0], [0, 0], [0, 0]]
})";
}

PoseVector sample_uniform(const ConstraintMatrix& constraints, Rng& rng) {
    PoseVector pose;
    pose.theta.resize(constraints.dof.size());
    for (size_t i = 0; i < constraints.dof.size(); ++i)
        pose.theta[i] = quantize_f32(rng.uniform(constraints.dof[i].lo, constraints.dof[i].hi));
    double* ori = &pose.root_orientation.x;
    double* tr = &pose.root_translation.x;
    for (int k = 0; k < 3; ++k)
        ori[k] = quantize_f32(rng.uniform(constraints.root_orientation[k].lo,
                                          constraints.root_orientation[k].hi));
    for (int k = 0; k < 3; ++k)
        tr[k] = quantize_f32(rng.uniform(constraints.root_translation[k].lo,
                                         constraints.root_translation[k].hi));
    // float32 rounding of a strict-interior draw can land exactly on a bound
    // but never outside it by more than rounding; clamp keeps the contract
    constraints.clamp(pose);
    return pose;
}

std::vector<PoseVector> sample_grid(const ConstraintMatrix& constraints,
                                    const std::vector<int>& dof_subset,
                                    const std::vector<int>& steps_per_dof,
                                    const PoseVector& base_pose,
                                    size_t cap) {
    if (dof_subset.empty())
        throw std::invalid_argument("sample_grid: empty DOF subset");
    if (dof_subset.size() != steps_per_dof.size())
        throw std::invalid_argument("sample_grid: subset/steps size mismatch");
    size_t total = 1;
    for (size_t k = 0; k < dof_subset.size(); ++k) {
        int idx = dof_subset[k], steps = steps_per_dof[k];
        if (idx < 0 || idx >= int(constraints.dof.size()))
            throw std::invalid_argument("sample_grid: DOF index out of range");
        if (steps < 1) throw std::invalid_argument("sample_grid: steps must be >= 1");
        if (total > cap / size_t(steps))
            throw std::invalid_argument(
                "sample_grid: step-count product exceeds cap; reduce the DOF subset or step counts");
        total *= size_t(steps);
    }

    std::vector<PoseVector> out;
    out.reserve(total);
    std::vector<int> counter(dof_subset.size(), 0);
    for (size_t n = 0; n < total; ++n) {
        PoseVector pose = base_pose;
        for (size_t k = 0; k < dof_subset.size(); ++k) {
            const Bounds& b = constraints.dof[dof_subset[k]];
            int steps = steps_per_dof[k];
            double v = steps == 1 ? 0.5 * (b.lo + b.hi)
                                  : b.lo + (b.hi - b.lo) * double(counter[k]) / double(steps - 1);
            pose.theta[dof_subset[k]] = v;
        }
        out.push_back(std::move(pose));
        // row-major: last subset dimension varies fastest
        for (int k = int(dof_subset.size()) - 1; k >= 0; --k) {
            if (++counter[k] < steps_per_dof[k]) break;
            counter[k] = 0;
        }
    }
    return out;
}

}  // namespace posegen
