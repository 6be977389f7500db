#include "posegen/evaluation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace posegen {

namespace {

double reference_length(const KeypointSet& gt, PckReference ref_mode) {
    if (ref_mode == PckReference::Torso) {
        const Vec2& ls = gt.points[int(Keypoint::ShoulderL)];
        const Vec2& rh = gt.points[int(Keypoint::HipR)];
        return std::hypot(ls.x - rh.x, ls.y - rh.y);
    }
    if (gt.bbox[0] < 0) throw std::invalid_argument("pck: ground truth has no foreground bbox");
    return double(std::max(gt.bbox[2] - gt.bbox[0], gt.bbox[3] - gt.bbox[1]));
}

}  // namespace

PckResult pck(const std::vector<KeypointSet>& predictions,
              const std::vector<KeypointSet>& ground_truth, double alpha,
              PckReference ref_mode, bool include_occluded) {
    if (predictions.size() != ground_truth.size())
        throw std::invalid_argument("pck: prediction/ground-truth image counts differ");
    PckResult res;
    res.alpha = alpha;
    res.reference = ref_mode;
    res.images = predictions.size();

    std::array<size_t, kKeypointCount> correct{}, total{};
    for (size_t i = 0; i < predictions.size(); ++i) {
        const KeypointSet& gt = ground_truth[i];
        const KeypointSet& pr = predictions[i];
        double lref = reference_length(gt, ref_mode);
        if (lref <= 0) throw std::invalid_argument("pck: degenerate reference length (L_ref = 0)");
        for (int k = 0; k < kKeypointCount; ++k) {
            if (gt.visibility[k] == Visibility::OutOfFrame) continue;
            if (!include_occluded && gt.visibility[k] == Visibility::Occluded) continue;
            ++total[k];
            double d = std::hypot(pr.points[k].x - gt.points[k].x, pr.points[k].y - gt.points[k].y);
            if (d <= alpha * lref) ++correct[k];
        }
    }
    double sum = 0;
    size_t evaluated = 0;
    for (int k = 0; k < kKeypointCount; ++k) {
        res.per_joint[k] = total[k] ? double(correct[k]) / double(total[k]) : 0.0;
        if (total[k]) {
            sum += res.per_joint[k];
            ++evaluated;
        }
    }
    res.joints_evaluated = evaluated;
    res.overall = evaluated ? sum / double(evaluated) : 0.0;
    return res;
}

std::vector<PckResult> pck_curve(const std::vector<KeypointSet>& predictions,
                                 const std::vector<KeypointSet>& ground_truth,
                                 const std::vector<double>& alphas,
                                 PckReference ref_mode, bool include_occluded) {
    for (size_t i = 1; i < alphas.size(); ++i)
        if (alphas[i] < alphas[i - 1])
            throw std::invalid_argument("pck_curve: alpha list must be sorted ascending");
    std::vector<PckResult> out;
    for (double a : alphas) out.push_back(pck(predictions, ground_truth, a, ref_mode, include_occluded));
    return out;
}

std::string pck_table(const std::vector<PckResult>& curve) {
    std::ostringstream os;
    os << "alpha,reference,overall";
    for (int k = 0; k < kKeypointCount; ++k) os << "," << keypoint_name(Keypoint(k));
    os << "\n";
    os.precision(6);
    for (const PckResult& r : curve) {
        os << r.alpha << "," << (r.reference == PckReference::Torso ? "torso" : "bbox") << ","
           << r.overall * 100.0;
        for (int k = 0; k < kKeypointCount; ++k) os << "," << r.per_joint[k] * 100.0;
        os << "\n";
    }
    return os.str();
}

}  // namespace posegen
