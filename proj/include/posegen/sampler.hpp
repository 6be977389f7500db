#pragma once

#include <string>
#include <vector>

#include "posegen/rig.hpp"
#include "posegen/rng.hpp"

namespace posegen {

struct Bounds {
    double lo = 0, hi = 0;  // radians (or meters for translation)
};

/// Per-DOF angle bounds plus root orientation/translation bounds; defines the
/// physically-valid pose manifold.
struct ConstraintMatrix {
    std::vector<Bounds> dof;        // one per theta index
    Bounds root_orientation[3];     // alpha, beta, gamma
    Bounds root_translation[3];     // meters, default zero

    bool satisfied_by(const PoseVector& pose, double tol = 0.0) const;
    void clamp(PoseVector& pose) const;
};

/// Parse a constraints document (JSON, degrees) against a skeleton's DOF
/// names. Unlisted DOFs take the document's "default_deg" range
/// (fallback [-90, 90]).
ConstraintMatrix load_constraints(const std::string& text, const Skeleton& skeleton);

/// Bundled defaults: elbows [0, 145] deg; "upright" root profile with
/// alpha, gamma in [-30, 30] deg.
std::string default_constraints_json();

/// Each DOF and root parameter drawn independently uniform within bounds.
/// Values are quantized to float32 so manifests reproduce them exactly.
PoseVector sample_uniform(const ConstraintMatrix& constraints, Rng& rng);

/// Cartesian grid over a DOF subset, linear spacing inclusive of both bounds
/// (single step -> midpoint), row-major order; other DOFs from base_pose.
std::vector<PoseVector> sample_grid(const ConstraintMatrix& constraints,
                                    const std::vector<int>& dof_subset,
                                    const std::vector<int>& steps_per_dof,
                                    const PoseVector& base_pose,
                                    size_t cap = 1000000);

}  // namespace posegen
