#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "posegen/evaluation.hpp"
#include "posegen/rng.hpp"

using namespace posegen;

namespace {

KeypointSet random_gt(Rng& rng) {
    KeypointSet s;
    for (int k = 0; k < kKeypointCount; ++k) {
        s.points[k] = {rng.uniform(50, 450), rng.uniform(50, 450)};
        s.visibility[k] = Visibility::Visible;
    }
    s.bbox = {40, 40, 460, 460};
    return s;
}

double torso_len(const KeypointSet& s) {
    const Vec2& ls = s.points[int(Keypoint::ShoulderL)];
    const Vec2& rh = s.points[int(Keypoint::HipR)];
    return std::hypot(ls.x - rh.x, ls.y - rh.y);
}

}  // namespace

TEST_CASE("ground truth scored against itself is 100% at every alpha") {
    Rng rng(1);
    std::vector<KeypointSet> gt;
    for (int i = 0; i < 20; ++i) gt.push_back(random_gt(rng));
    for (double alpha : {0.05, 0.2, 0.5}) {
        for (auto ref : {PckReference::Torso, PckReference::Bbox}) {
            PckResult r = pck(gt, gt, alpha, ref);
            CHECK(r.overall == 1.0);
            for (int k = 0; k < kKeypointCount; ++k) CHECK(r.per_joint[k] == 1.0);
        }
    }
}

TEST_CASE("offsets of 1.01 * alpha * L_ref score 0%; 0.99 scores 100%") {
    Rng rng(2);
    double alpha = 0.5;
    std::vector<KeypointSet> gt, just_out, just_in;
    for (int i = 0; i < 10; ++i) {
        KeypointSet g = random_gt(rng);
        double L = torso_len(g);
        KeypointSet out = g, in = g;
        for (int k = 0; k < kKeypointCount; ++k) {
            out.points[k].x += 1.01 * alpha * L;
            in.points[k].x += 0.99 * alpha * L;
        }
        gt.push_back(g);
        just_out.push_back(out);
        just_in.push_back(in);
    }
    CHECK(pck(just_out, gt, alpha, PckReference::Torso).overall == 0.0);
    CHECK(pck(just_in, gt, alpha, PckReference::Torso).overall == 1.0);
}

TEST_CASE("accuracy is monotone non-decreasing in alpha") {
    Rng rng(3);
    std::vector<KeypointSet> gt, pred;
    for (int i = 0; i < 30; ++i) {
        KeypointSet g = random_gt(rng);
        KeypointSet p = g;
        for (int k = 0; k < kKeypointCount; ++k) {
            p.points[k].x += rng.uniform(-60, 60);
            p.points[k].y += rng.uniform(-60, 60);
        }
        gt.push_back(g);
        pred.push_back(p);
    }
    std::vector<double> alphas = {0.05, 0.1, 0.2, 0.3, 0.5, 1.0};
    auto curve = pck_curve(pred, gt, alphas, PckReference::Torso);
    for (size_t i = 1; i < curve.size(); ++i) {
        CHECK(curve[i].overall >= curve[i - 1].overall);
        for (int k = 0; k < kKeypointCount; ++k)
            CHECK(curve[i].per_joint[k] >= curve[i - 1].per_joint[k]);
    }
    CHECK(curve.back().overall > curve.front().overall);  // spread actually exercises the curve
}

TEST_CASE("globally scaling both point sets leaves PCK unchanged") {
    Rng rng(4);
    std::vector<KeypointSet> gt, pred, gt2, pred2;
    for (int i = 0; i < 15; ++i) {
        KeypointSet g = random_gt(rng);
        KeypointSet p = g;
        for (int k = 0; k < kKeypointCount; ++k) p.points[k].x += rng.uniform(-40, 40);
        KeypointSet gs = g, ps = p;
        for (int k = 0; k < kKeypointCount; ++k) {
            gs.points[k] = {g.points[k].x * 3.0, g.points[k].y * 3.0};
            ps.points[k] = {p.points[k].x * 3.0, p.points[k].y * 3.0};
        }
        gs.bbox = {g.bbox[0] * 3, g.bbox[1] * 3, g.bbox[2] * 3, g.bbox[3] * 3};
        gt.push_back(g); pred.push_back(p);
        gt2.push_back(gs); pred2.push_back(ps);
    }
    for (double alpha : {0.1, 0.2, 0.5}) {
        PckResult a = pck(pred, gt, alpha, PckReference::Torso);
        PckResult b = pck(pred2, gt2, alpha, PckReference::Torso);
        CHECK(a.overall == b.overall);
        PckResult c = pck(pred, gt, alpha, PckReference::Bbox);
        PckResult d = pck(pred2, gt2, alpha, PckReference::Bbox);
        CHECK(c.overall == d.overall);
    }
}

TEST_CASE("7 of 14 joints correct gives exactly 50%") {
    Rng rng(5);
    KeypointSet g = random_gt(rng);
    KeypointSet p = g;
    double L = torso_len(g);
    for (int k = 0; k < 7; ++k) p.points[k].x += 2.0 * 0.2 * L;  // push 7 joints far out
    PckResult r = pck({p}, {g}, 0.2, PckReference::Torso);
    CHECK(r.overall == 0.5);
}

TEST_CASE("GT out-of-frame joints are excluded; occluded joints honor the flag") {
    Rng rng(6);
    KeypointSet g = random_gt(rng);
    g.visibility[0] = Visibility::OutOfFrame;
    g.visibility[1] = Visibility::Occluded;
    KeypointSet p = g;
    double L = torso_len(g);
    p.points[0].x += 10 * L;  // wrong, but excluded
    p.points[1].x += 10 * L;  // wrong, occluded

    PckResult with_occ = pck({p}, {g}, 0.2, PckReference::Torso, true);
    CHECK(with_occ.joints_evaluated == 13);
    CHECK(with_occ.per_joint[1] == 0.0);
    CHECK(with_occ.overall == doctest::Approx(12.0 / 13.0));

    PckResult no_occ = pck({p}, {g}, 0.2, PckReference::Torso, false);
    CHECK(no_occ.joints_evaluated == 12);
    CHECK(no_occ.overall == 1.0);
}

TEST_CASE("bbox reference uses max(width, height) of the GT box") {
    Rng rng(7);
    KeypointSet g = random_gt(rng);
    g.bbox = {100, 100, 300, 150};  // width 200, height 50
    KeypointSet p = g;
    p.points[0].y += 0.2 * 200 * 0.99;
    CHECK(pck({p}, {g}, 0.2, PckReference::Bbox).overall == 1.0);
    p.points[0].y = g.points[0].y + 0.2 * 200 * 1.01;
    CHECK(pck({p}, {g}, 0.2, PckReference::Bbox).overall < 1.0);
}

TEST_CASE("error paths: count mismatch, degenerate reference, unsorted curve") {
    Rng rng(8);
    KeypointSet g = random_gt(rng);
    CHECK_THROWS_AS(pck({g, g}, {g}, 0.2, PckReference::Torso), std::invalid_argument);

    KeypointSet degenerate = g;
    degenerate.points[int(Keypoint::ShoulderL)] = degenerate.points[int(Keypoint::HipR)];
    CHECK_THROWS_AS(pck({degenerate}, {degenerate}, 0.2, PckReference::Torso),
                    std::invalid_argument);
    KeypointSet no_box = g;
    no_box.bbox = {-1, -1, -1, -1};
    CHECK_THROWS_AS(pck({no_box}, {no_box}, 0.2, PckReference::Bbox), std::invalid_argument);

    CHECK_THROWS_AS(pck_curve({g}, {g}, {0.5, 0.2}, PckReference::Torso), std::invalid_argument);
}

TEST_CASE("pck_table emits one CSV row per alpha with the reference named") {
    Rng rng(9);
    std::vector<KeypointSet> gt = {random_gt(rng), random_gt(rng)};
    auto curve = pck_curve(gt, gt, {0.2, 0.5}, PckReference::Torso);
    std::string table = pck_table(curve);
    CHECK(table.find("alpha,reference,overall") == 0);
    CHECK(table.find("0.2,torso,100") != std::string::npos);
    CHECK(table.find("0.5,torso,100") != std::string::npos);
    CHECK(table.find("head_top") != std::string::npos);
}
