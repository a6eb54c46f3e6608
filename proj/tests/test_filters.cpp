#include "doctest.h"

#include "radml/feature_dictionary.hpp"
#include "radml/features.hpp"
#include "radml/rng.hpp"

#include <cmath>
#include <functional>
#include <map>

using namespace radml;

namespace {

struct Pair3D {
    ImageVolume image;
    RoiMask mask;
};

Pair3D make_volume(std::array<std::size_t, 3> dims,
                   const std::function<double(long, long, long)>& value,
                   const std::function<bool(long, long, long)>& fg) {
    Pair3D p;
    p.image.dims = dims;
    p.image.voxels.assign(dims[0] * dims[1] * dims[2], 0.0);
    p.mask.dims = dims;
    p.mask.voxels.assign(dims[0] * dims[1] * dims[2], 0);
    for (std::size_t z = 0; z < dims[2]; ++z) {
        for (std::size_t y = 0; y < dims[1]; ++y) {
            for (std::size_t x = 0; x < dims[0]; ++x) {
                const auto lx = static_cast<long>(x), ly = static_cast<long>(y),
                           lz = static_cast<long>(z);
                p.image.at(x, y, z) = value(lx, ly, lz);
                p.mask.set(x, y, z, fg(lx, ly, lz));
            }
        }
    }
    return p;
}

std::map<std::string, double> filters_by_name(const Pair3D& p) {
    auto values = features::filter_bank_features(p.image, p.mask);
    const auto& names = canonical_feature_names();
    // filter block = last 312 canonical names
    const std::size_t base = names.size() - 312;
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < values.size(); ++i) out[names[base + i]] = values[i];
    return out;
}

} // namespace

TEST_CASE("constant image: zero response filters and flat LBP") {
    auto p = make_volume({20, 20, 3}, [](long, long, long) { return 42.0; },
                         [](long x, long y, long) { return x >= 6 && x < 14 && y >= 6 && y < 14; });
    auto f = filters_by_name(p);

    // Gabor magnitude vanishes for all 12 parameter pairs (DC removed)
    for (const char* freq : {"0.05", "0.2", "0.5"}) {
        for (const char* ang : {"0.0", "0.79", "1.57", "2.36"}) {
            const double v = f["tf_Gabor_max_F" + std::string(freq) + "_A" + ang];
            CHECK(std::abs(v) <= 1e-8 * 42.0);
        }
    }
    for (const char* sigma : {"1", "5", "10"}) {
        CHECK(std::abs(f["tf_LoG_max_sigma" + std::string(sigma)]) <= 1e-8 * 42.0);
    }
    CHECK(f["vf_Frangi_full_max_SR(1.0. 10.0)_SS2.0"] == 0.0);
    CHECK(f["vf_Frangi_inner_max_SR(1.0. 10.0)_SS2.0"] == 0.0);

    // all LBP codes identical -> zero spread
    CHECK(f["tf_LBP_std_R1P8"] == 0.0);
    CHECK(f["tf_LBP_std_R2P12"] == 0.0);
    CHECK(f["tf_LBP_std_R3P16"] == 0.0);
}

TEST_CASE("a bright ridge excites Frangi more than an isotropic blob") {
    // vertical ridge of width 3 through the lesion
    auto ridge = make_volume(
        {24, 24, 1},
        [](long x, long, long) { return (x >= 11 && x <= 13) ? 100.0 : 0.0; },
        [](long x, long y, long) { return x >= 6 && x < 18 && y >= 6 && y < 18; });
    // isotropic blob of roughly equal bright area (radius ~3.4 -> area ~36)
    auto blob = make_volume(
        {24, 24, 1},
        [](long x, long y, long) {
            const double dx = x - 11.5, dy = y - 11.5;
            return dx * dx + dy * dy <= 11.5 ? 100.0 : 0.0;
        },
        [](long x, long y, long) { return x >= 6 && x < 18 && y >= 6 && y < 18; });

    auto fr = filters_by_name(ridge);
    auto fb = filters_by_name(blob);
    const std::string inner_mean = "vf_Frangi_inner_mean_SR(1.0. 10.0)_SS2.0";
    CHECK(fr[inner_mean] > fb[inner_mean]);
}

TEST_CASE("gabor responds to a grating at its frequency and orientation") {
    auto grating = make_volume(
        {32, 32, 1},
        [](long x, long, long) { return std::cos(2.0 * 3.14159265358979 * 0.2 * x) * 50.0; },
        [](long x, long y, long) { return x >= 10 && x < 22 && y >= 10 && y < 22; });
    auto f = filters_by_name(grating);
    // horizontal frequency 0.2 -> strongest at angle 0, weaker at 90 degrees
    CHECK(f["tf_Gabor_mean_F0.2_A0.0"] > 5.0 * f["tf_Gabor_mean_F0.2_A1.57"]);
}

TEST_CASE("phase features are bounded and respond to symmetry") {
    auto p = make_volume(
        {32, 32, 1},
        [](long x, long, long) { return std::abs(x - 16) <= 1 ? 100.0 : 0.0; },
        [](long x, long y, long) { return x >= 8 && x < 24 && y >= 8 && y < 24; });
    auto f = filters_by_name(p);
    CHECK(f["phasef_phasecong_max"] <= 1.0 + 1e-9);
    CHECK(f["phasef_phasecong_min"] >= 0.0);
    CHECK(f["phasef_phasesym_max"] <= 1.0 + 1e-9);
    CHECK(f["phasef_monogenic_max"] <= 3.14159265358979 + 1e-9);
    CHECK(f["phasef_monogenic_min"] >= -3.14159265358979 - 1e-9);
    // the symmetric bar produces nonzero symmetry response
    CHECK(f["phasef_phasesym_max"] > 0.05);
}

TEST_CASE("filter features ignore pixels beyond the context margin") {
    // slab wide enough that a far strip lies outside bbox + margin
    const std::array<std::size_t, 3> dims = {160, 40, 2};
    auto fg = [](long x, long y, long) { return x >= 8 && x < 24 && y >= 12 && y < 28; };
    Rng noise = Rng::derive(5, "far-noise");

    auto base = make_volume(dims, [](long x, long y, long z) {
        return std::sin(0.3 * x) * 10.0 + y * 0.5 + z;
    }, fg);

    auto far_randomized = base;
    // mask bbox x < 24; margin 32 -> pixels with x >= 24 + 32 + 4 cannot matter
    for (std::size_t z = 0; z < dims[2]; ++z) {
        for (std::size_t y = 0; y < dims[1]; ++y) {
            for (std::size_t x = 60; x < dims[0]; ++x) {
                far_randomized.image.at(x, y, z) = noise.uniform(-500.0, 500.0);
            }
        }
    }

    auto a = features::filter_bank_features(base.image, base.mask);
    auto b = features::filter_bank_features(far_randomized.image, far_randomized.mask);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CAPTURE(i);
        CHECK(a[i] == b[i]);
    }
}
