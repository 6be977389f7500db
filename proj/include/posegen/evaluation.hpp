#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "posegen/renderer.hpp"

namespace posegen {

enum class PckReference { Torso, Bbox };

/// One image's keypoints for evaluation. Predictions carry no visibility or
/// bbox; ground truth does.
struct KeypointSet {
    std::array<Vec2, kKeypointCount> points{};
    std::array<Visibility, kKeypointCount> visibility{};  // GT only; preds all Visible
    std::array<int, 4> bbox = {-1, -1, -1, -1};           // GT foreground box (Bbox mode)
};

struct PckResult {
    double alpha = 0;
    PckReference reference = PckReference::Torso;
    std::array<double, kKeypointCount> per_joint{};  // correct fraction
    double overall = 0;                              // mean over evaluated joints
    size_t images = 0;
    size_t joints_evaluated = 0;
};

/// Keypoint correct iff ||pred - gt||_2 <= alpha * L_ref. GT out_of_frame
/// keypoints are excluded; occluded keypoints included unless
/// include_occluded is false. L_ref: torso = GT left-shoulder to right-hip
/// distance; bbox = max(GT box width, height).
PckResult pck(const std::vector<KeypointSet>& predictions,
              const std::vector<KeypointSet>& ground_truth, double alpha,
              PckReference ref_mode, bool include_occluded = true);

std::vector<PckResult> pck_curve(const std::vector<KeypointSet>& predictions,
                                 const std::vector<KeypointSet>& ground_truth,
                                 const std::vector<double>& alphas,
                                 PckReference ref_mode, bool include_occluded = true);

/// CSV-style table mirroring accuracy-vs-alpha output.
std::string pck_table(const std::vector<PckResult>& curve);

}  // namespace posegen
