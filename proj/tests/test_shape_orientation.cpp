#include "doctest.h"

#include "radml/feature_dictionary.hpp"
#include "radml/features.hpp"

#include <cmath>
#include <functional>
#include <map>

using namespace radml;

namespace {

RoiMask make_mask(std::array<std::size_t, 3> dims,
                  const std::function<bool(long, long, long)>& fg,
                  std::array<double, 3> spacing = {1, 1, 1}) {
    RoiMask m;
    m.dims = dims;
    m.spacing = spacing;
    m.voxels.assign(dims[0] * dims[1] * dims[2], 0);
    for (std::size_t z = 0; z < dims[2]; ++z) {
        for (std::size_t y = 0; y < dims[1]; ++y) {
            for (std::size_t x = 0; x < dims[0]; ++x) {
                if (fg(static_cast<long>(x), static_cast<long>(y), static_cast<long>(z))) {
                    m.set(x, y, z, true);
                }
            }
        }
    }
    return m;
}

std::map<std::string, double> shape_by_name(const RoiMask& m) {
    auto values = features::shape_features(m);
    std::map<std::string, double> out;
    const auto& names = canonical_feature_names();
    std::size_t base = 13; // shape block starts after histogram
    for (std::size_t i = 0; i < values.size(); ++i) out[names[base + i]] = values[i];
    return out;
}

} // namespace

TEST_CASE("cube shape basics") {
    // 2x2x2 cube centered in a 6x6x6 volume
    auto m = make_mask({6, 6, 6}, [](long x, long y, long z) {
        return x >= 2 && x <= 3 && y >= 2 && y <= 3 && z >= 2 && z <= 3;
    });
    auto f = shape_by_name(m);
    CHECK(f["sf_volume"] == doctest::Approx(8.0));
    CHECK(f["sf_volume_count"] == doctest::Approx(8.0));
    CHECK(f["sf_area_avg_2D"] == doctest::Approx(4.0));
    CHECK(f["sf_area_std_2D"] == doctest::Approx(0.0));
    CHECK(f["sf_area_min_2D"] == doctest::Approx(4.0));
    CHECK(f["sf_area_max_2D"] == doctest::Approx(4.0));
    CHECK(f["sf_elongation"] == doctest::Approx(1.0));
    CHECK(f["sf_flatness"] == doctest::Approx(1.0));
}

TEST_CASE("rod is more elongated than a cube") {
    auto rod = make_mask({3, 3, 10}, [](long x, long y, long z) {
        return x == 1 && y == 1 && z >= 1 && z <= 8;
    });
    auto cube = make_mask({4, 4, 4}, [](long x, long y, long z) {
        return x >= 1 && x <= 2 && y >= 1 && y <= 2 && z >= 1 && z <= 2;
    });
    auto fr = shape_by_name(rod);
    auto fc = shape_by_name(cube);
    CHECK(fr["sf_elongation"] > fc["sf_elongation"]);
    CHECK(fr["sf_elongation"] == doctest::Approx(8.0));
    CHECK(fr["sf_major_axis_length"] > fr["sf_minor_axis_length"]);
}

TEST_CASE("digital sphere r=8: sphericity and diameters") {
    const double r = 8.0;
    auto m = make_mask({24, 24, 24}, [&](long x, long y, long z) {
        const double dx = x - 11.5, dy = y - 11.5, dz = z - 11.5;
        return dx * dx + dy * dy + dz * dz <= r * r;
    });
    auto f = shape_by_name(m);
    CHECK(f["sf_sphericity"] >= 0.9);
    CHECK(f["sf_sphericity"] <= 1.0);
    CHECK(f["sf_max_diameter_3D"] >= 14.0);
    CHECK(f["sf_max_diameter_3D"] <= 18.0);
    // mesh volume close to (4/3) pi r^3
    CHECK(f["sf_volume_mesh"] ==
          doctest::Approx(4.0 / 3.0 * 3.14159265358979 * r * r * r).epsilon(0.15));
    // all slice descriptors of a sphere are near-circular
    CHECK(f["sf_compactness_avg"] > 0.75);
    CHECK(f["sf_solidity_avg"] > 0.9);
}

TEST_CASE("spacing scales physical quantities") {
    auto iso = make_mask({8, 8, 8}, [](long x, long y, long z) {
        return x >= 2 && x <= 5 && y >= 2 && y <= 5 && z >= 2 && z <= 5;
    });
    auto aniso = make_mask({8, 8, 8},
                           [](long x, long y, long z) {
                               return x >= 2 && x <= 5 && y >= 2 && y <= 5 && z >= 2 && z <= 5;
                           },
                           {2, 1, 1});
    auto fi = shape_by_name(iso);
    auto fa = shape_by_name(aniso);
    CHECK(fa["sf_volume"] == doctest::Approx(2.0 * fi["sf_volume"]));
    CHECK(fa["sf_area_avg_2D"] == doctest::Approx(2.0 * fi["sf_area_avg_2D"]));
}

TEST_CASE("orientation: translation shifts COM and keeps angles") {
    auto ellipsoid = [](long x, long y, long z, double cx, double cy, double cz) {
        const double a = 6, b = 3, c = 2;
        const double dx = (x - cx) / a, dy = (y - cy) / b, dz = (z - cz) / c;
        return dx * dx + dy * dy + dz * dz <= 1.0;
    };
    auto m1 = make_mask({24, 24, 24}, [&](long x, long y, long z) {
        return ellipsoid(x, y, z, 10, 12, 12);
    });
    auto m2 = make_mask({24, 24, 24}, [&](long x, long y, long z) {
        return ellipsoid(x, y, z, 13, 12, 12);
    });
    auto o1 = features::orientation_features(m1);
    auto o2 = features::orientation_features(m2);
    CHECK(o2[3] - o1[3] == doctest::Approx(3.0).epsilon(1e-9)); // COM index x
    CHECK(o2[4] == doctest::Approx(o1[4]));
    for (int i = 0; i < 3; ++i) CHECK(o1[static_cast<std::size_t>(i)] ==
                                      doctest::Approx(o2[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("orientation: sphere angles are zero by the degeneracy rule") {
    auto m = make_mask({20, 20, 20}, [](long x, long y, long z) {
        const double dx = x - 9.5, dy = y - 9.5, dz = z - 9.5;
        return dx * dx + dy * dy + dz * dz <= 36.0;
    });
    auto o = features::orientation_features(m);
    CHECK(o[0] == 0.0);
    CHECK(o[1] == 0.0);
    CHECK(o[2] == 0.0);
}

TEST_CASE("orientation: 90 degree in-plane rotation swaps theta_x and theta_y") {
    // ellipsoid tilted 30 degrees in the x-y plane
    auto tilted = [](double angle_deg) {
        const double t = angle_deg * 3.14159265358979 / 180.0;
        return [t](long x, long y, long z) {
            const double cx = 15.5, cy = 15.5, cz = 7.5;
            const double ux = (x - cx) * std::cos(t) + (y - cy) * std::sin(t);
            const double uy = -(x - cx) * std::sin(t) + (y - cy) * std::cos(t);
            const double uz = z - cz;
            return ux * ux / 100.0 + uy * uy / 16.0 + uz * uz / 9.0 <= 1.0;
        };
    };
    auto m1 = make_mask({32, 32, 16}, tilted(30));
    auto m2 = make_mask({32, 32, 16}, tilted(120));
    auto o1 = features::orientation_features(m1);
    auto o2 = features::orientation_features(m2);
    CHECK(o1[0] == doctest::Approx(o2[1]).epsilon(1e-6));
    CHECK(o1[1] == doctest::Approx(o2[0]).epsilon(1e-6));
    CHECK(o1[2] == doctest::Approx(o2[2]).epsilon(1e-6));
}
