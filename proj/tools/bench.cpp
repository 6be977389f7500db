// Compares the OpenMP kernels against their serial reference implementations.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "posegen/demo_assets.hpp"
#include "posegen/domain_adapt.hpp"
#include "posegen/renderer.hpp"
#include "posegen/sampler.hpp"

using namespace posegen;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Image test_image(int w, int h) {
    Image img(w, h);
    Rng rng(7);
    for (uint8_t& b : img.pixels) b = uint8_t(rng.next_below(256));
    return img;
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (built without OpenMP)\n");
#endif

    const int reps = 5;

    // gaussian blur, 1024x1024, sigma 3
    {
        Image img = test_image(1024, 1024);
        Image a, b;
        auto t0 = Clock::now();
        for (int i = 0; i < reps; ++i) a = gaussian_blur_serial(img, 3.0);
        double serial = ms_since(t0) / reps;
        t0 = Clock::now();
        for (int i = 0; i < reps; ++i) b = gaussian_blur(img, 3.0);
        double parallel = ms_since(t0) / reps;
        std::printf("blur 1024x1024 s=3   serial %8.2f ms   parallel %8.2f ms   speedup %.2fx   %s\n",
                    serial, parallel, serial / parallel, a == b ? "identical" : "MISMATCH");
    }

    // full sample render, 512x512 capsule person
    {
        Skeleton rig = canonical_rig();
        CapsulePerson person = capsule_person(rig);
        ConstraintMatrix constraints = load_constraints(default_constraints_json(), rig);
        VertexBinding binding;
        binding.mode = VertexBinding::Mode::Rigid;
        binding.labels = person.source_bone;

        Rng rng(11);
        EnvParams env;
        env.image_width = env.image_height = 512;
        auto t0 = Clock::now();
        for (int i = 0; i < reps; ++i) {
            PoseVector pose = sample_uniform(constraints, rng);
            BoneTransforms tr = forward_kinematics(rig, pose);
            Mesh posed = apply_pose(person.mesh, binding, tr);
            Camera cam = make_camera(env, tr.world[rig.bone_index("T")].apply({0, 0, 0}));
            Framebuffer fb = rasterize(posed, cam, env.light);
            (void)fb;
        }
        std::printf("render 512x512 capsule person            %8.2f ms / sample\n",
                    ms_since(t0) / reps);
    }
    return 0;
}
