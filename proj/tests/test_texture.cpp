#include "doctest.h"

#include "oracles.hpp"
#include "radml/feature_dictionary.hpp"
#include "radml/features.hpp"
#include "radml/rng.hpp"

#include <cmath>

using namespace radml;

namespace {

/// Single-slice image/mask pair from a 2-D value grid; negative cells are
/// outside the mask.
struct Patch2D {
    ImageVolume image;
    RoiMask mask;
};

Patch2D make_patch(const std::vector<std::vector<double>>& rows,
                   const std::vector<std::vector<int>>* mask_rows = nullptr) {
    Patch2D p;
    const std::size_t ny = rows.size(), nx = rows[0].size();
    p.image.dims = {nx, ny, 1};
    p.image.voxels.assign(nx * ny, 0.0);
    p.mask.dims = {nx, ny, 1};
    p.mask.voxels.assign(nx * ny, 0);
    for (std::size_t y = 0; y < ny; ++y) {
        for (std::size_t x = 0; x < nx; ++x) {
            p.image.voxels[y * nx + x] = rows[y][x];
            const bool fg = mask_rows ? (*mask_rows)[y][x] != 0 : true;
            p.mask.voxels[y * nx + x] = fg ? 1 : 0;
        }
    }
    return p;
}

/// Quantized oracle patch matching the library's 16-level min-max rule with
/// occupied bins compacted to dense ranks.
oracle::Patch quantized_patch(const ImageVolume& img, const RoiMask& mask, int n_levels = 16) {
    std::vector<double> roi;
    for (std::size_t i = 0; i < mask.voxels.size(); ++i) {
        if (mask.voxels[i]) roi.push_back(img.voxels[i]);
    }
    auto levels = quantize(roi, n_levels);
    std::vector<int> rank(static_cast<std::size_t>(n_levels), -1);
    for (int l : levels) rank[static_cast<std::size_t>(l)] = 0;
    int next = 0;
    for (auto& r : rank) {
        if (r == 0) r = next++;
    }
    for (auto& l : levels) l = rank[static_cast<std::size_t>(l)];
    oracle::Patch p;
    p.nx = static_cast<int>(img.dims[0]);
    p.ny = static_cast<int>(img.dims[1]);
    p.levels.assign(img.voxels.size(), -1);
    std::size_t k = 0;
    for (std::size_t i = 0; i < img.voxels.size(); ++i) {
        if (mask.voxels[i]) p.levels[i] = levels[k++];
    }
    return p;
}

bool same_or_both_missing(double a, double b, double tol) {
    if (std::isnan(a) && std::isnan(b)) return true;
    return std::abs(a - b) <= tol;
}

/// Compares library GLCM output against the pair-enumeration oracle for a
/// single-slice patch (normal and MS variants coincide on one slice except
/// for the std, which is 0 where defined).
void check_glcm_against_oracle(const Patch2D& p, double tol) {
    auto values = features::glcm_features(p.image, p.mask);
    auto q = quantized_patch(p.image, p.mask);
    std::size_t idx = 0;
    for (int f = 0; f < 6; ++f) {
        for (int d = 0; d < 2; ++d) {
            const int distance = d == 0 ? 1 : 3;
            for (int a = 0; a < 4; ++a) {
                auto counts = oracle::glcm_counts(q, a, distance, 16);
                double total = 0;
                for (double c : counts) total += c;
                double expected = std::numeric_limits<double>::quiet_NaN();
                double expected_std = std::numeric_limits<double>::quiet_NaN();
                if (total > 0) {
                    auto feats = oracle::glcm_eval(counts, 16);
                    const double raw[6] = {feats.contrast, feats.dissimilarity, feats.homogeneity,
                                           feats.asm_value, feats.energy, feats.correlation};
                    const bool defined = f != 5 || feats.correlation_defined;
                    if (defined) {
                        expected = raw[f];
                        expected_std = 0.0;
                    }
                }
                CAPTURE(f);
                CAPTURE(distance);
                CAPTURE(a);
                CHECK(same_or_both_missing(values[idx], expected, tol));     // summed
                CHECK(same_or_both_missing(values[idx + 1], expected, tol)); // ms mean
                CHECK(same_or_both_missing(values[idx + 2], expected_std, tol)); // ms std
                idx += 3;
            }
        }
    }
}

void check_matrix_families_against_oracle(const Patch2D& p, double tol) {
    auto values = features::matrix_family_features(p.image, p.mask);
    auto q = quantized_patch(p.image, p.mask);
    const double n_pixels = q.pixel_count();

    auto glszm = oracle::zone_features(oracle::zone_list(q), n_pixels, false);
    auto glrlm = oracle::zone_features(oracle::run_list(q), n_pixels * 4.0, true);
    for (std::size_t i = 0; i < 16; ++i) {
        CAPTURE(i);
        CHECK(same_or_both_missing(values[i], glszm[i], tol));
        CHECK(same_or_both_missing(values[16 + i], glrlm[i], tol));
    }
}

} // namespace

TEST_CASE("glcm checkerboard matches the hand enumeration") {
    auto p = make_patch({{0, 1}, {1, 0}});
    auto values = features::glcm_features(p.image, p.mask);
    const auto& names = canonical_feature_names();
    // locate glcm block offset within the canonical order
    std::size_t base = 0;
    while (names[base].rfind("tf_GLCM", 0) != 0) ++base;

    auto value_of = [&](const std::string& name) {
        std::size_t i = 0;
        while (names[base + i] != name) ++i;
        return values[i];
    };
    // two horizontal pairs, symmetrized: P = [[0, .5], [.5, 0]]
    CHECK(value_of("tf_GLCM_contrastd1.0A0.0") == doctest::Approx(1.0));
    CHECK(value_of("tf_GLCM_energyd1.0A0.0") == doctest::Approx(0.5));
    CHECK(value_of("tf_GLCM_homogeneityd1.0A0.0") == doctest::Approx(0.5));
    CHECK(value_of("tf_GLCM_ASMd1.0A0.0") == doctest::Approx(0.5));
    CHECK(value_of("tf_GLCM_dissimilarityd1.0A0.0") == doctest::Approx(1.0));
}

TEST_CASE("glcm constant lesion collapses to a single level") {
    auto p = make_patch({{5, 5}, {5, 5}});
    auto values = features::glcm_features(p.image, p.mask);
    // P = [[1]]: contrast 0, energy 1, homogeneity 1; correlation undefined
    CHECK(values[0] == doctest::Approx(0.0));  // contrast summed, d1 a0
    std::size_t idx = 0;
    // feature order: contrast, dissimilarity, homogeneity, ASM, energy, correlation
    auto block = [&](int f, int d, int a) { return (static_cast<std::size_t>(f) * 8 + d * 4 + a) * 3; };
    CHECK(values[block(2, 0, 0)] == doctest::Approx(1.0)); // homogeneity
    CHECK(values[block(4, 0, 0)] == doctest::Approx(1.0)); // energy
    CHECK(std::isnan(values[block(5, 0, 0)]));             // correlation sentinel
    (void)idx;
}

TEST_CASE("glcm single pixel mask is an error") {
    auto p = make_patch({{1}});
    CHECK_THROWS_AS(features::glcm_features(p.image, p.mask), DataError);
}

TEST_CASE("glcm random 8x8 lesions equal the pair-enumeration oracle") {
    Rng rng = Rng::derive(99, "glcm-oracle");
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<double>> rows(8, std::vector<double>(8));
        for (auto& r : rows) {
            for (auto& v : r) v = std::floor(rng.uniform(0.0, 400.0));
        }
        auto p = make_patch(rows);
        check_glcm_against_oracle(p, 1e-10);
    }
}

TEST_CASE("texture matrices match oracles on all 512 binary 3x3 patches") {
    for (int bits = 0; bits < 512; ++bits) {
        std::vector<std::vector<double>> rows(3, std::vector<double>(3));
        for (int i = 0; i < 9; ++i) rows[i / 3][i % 3] = (bits >> i) & 1;
        auto p = make_patch(rows);
        check_glcm_against_oracle(p, 1e-10);
        check_matrix_families_against_oracle(p, 1e-10);
    }
}

TEST_CASE("texture matrices match oracles on random 8x8 patches") {
    Rng rng = Rng::derive(7, "matrix-oracle");
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<double>> rows(8, std::vector<double>(8));
        std::vector<std::vector<int>> mask(8, std::vector<int>(8));
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 8; ++x) {
                rows[y][x] = std::floor(rng.uniform(0.0, 300.0));
                mask[y][x] = rng.uniform01() < 0.8 ? 1 : 0;
            }
        }
        mask[4][4] = 1; // non-empty
        auto p = make_patch(rows, &mask);
        check_glcm_against_oracle(p, 1e-10);
        check_matrix_families_against_oracle(p, 1e-10);
    }
}

TEST_CASE("constant 4x4 lesion run/zone examples") {
    auto p = make_patch(std::vector<std::vector<double>>(4, std::vector<double>(4, 9.0)));
    auto values = features::matrix_family_features(p.image, p.mask);

    // GLSZM ZonePercentage: one zone of 16 pixels -> 1/16
    CHECK(values[14] == doctest::Approx(1.0 / 16.0));

    // GLRLM LongRunEmphasis from the hand enumeration:
    // horizontal + vertical: 8 runs of length 4; each diagonal: 1,2,3,4,3,2,1
    double n_runs = 8 + 7 + 7;
    double lre = (8 * 16.0 + 2 * (1 + 4 + 9 + 16 + 9 + 4 + 1)) / n_runs;
    CHECK(values[16 + 4] == doctest::Approx(lre));

    // NGTDM contrast of a constant lesion is 0
    CHECK(values[32 + 14 + 3] == doctest::Approx(0.0));
}

TEST_CASE("single pixel lesion gives a finite dependence matrix") {
    std::vector<std::vector<double>> rows(3, std::vector<double>(3, 1.0));
    std::vector<std::vector<int>> mask(3, std::vector<int>(3, 0));
    mask[1][1] = 1;
    auto p = make_patch(rows, &mask);
    auto values = features::matrix_family_features(p.image, p.mask);
    // GLDM block: entries 32..45; dependence size 1 (only itself)
    for (int i = 32; i < 46; ++i) {
        CAPTURE(i);
        CHECK(std::isfinite(values[static_cast<std::size_t>(i)]));
    }
    // LargeDependenceEmphasis of a single (level, size=1) entry is 1
    CHECK(values[32 + 7] == doctest::Approx(1.0));
}

TEST_CASE("90 degree rotation permutes the angle features as sets") {
    Rng rng = Rng::derive(3, "rotate");
    std::vector<std::vector<double>> rows(6, std::vector<double>(6));
    for (auto& r : rows) {
        for (auto& v : r) v = std::floor(rng.uniform(0.0, 50.0));
    }
    // rotate 90 degrees counterclockwise: (x, y) -> (y, nx-1-x)
    std::vector<std::vector<double>> rot(6, std::vector<double>(6));
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 6; ++x) rot[5 - x][y] = rows[y][x];
    }
    auto a = features::glcm_features(make_patch(rows).image, make_patch(rows).mask);
    auto b = features::glcm_features(make_patch(rot).image, make_patch(rot).mask);

    // summed-variant values for feature f, distance d: angles {0,90} and {45,135}
    auto angle_pair = [&](const std::vector<double>& v, int f, int d, int a1, int a2) {
        auto block = [&](int angle) {
            return (static_cast<std::size_t>(f) * 8 + static_cast<std::size_t>(d) * 4 +
                    static_cast<std::size_t>(angle)) * 3;
        };
        return std::pair<double, double>(v[block(a1)], v[block(a2)]);
    };
    for (int f = 0; f < 5; ++f) { // correlation may be NaN; check the defined five
        for (int d = 0; d < 2; ++d) {
            auto [a0, a90] = angle_pair(a, f, d, 0, 2);
            auto [b0, b90] = angle_pair(b, f, d, 0, 2);
            // rotation swaps horizontal and vertical pairs
            CHECK(((std::abs(a0 - b90) < 1e-12 && std::abs(a90 - b0) < 1e-12) ||
                   (std::abs(a0 - b0) < 1e-12 && std::abs(a90 - b90) < 1e-12)));
            auto [a45, a135] = angle_pair(a, f, d, 1, 3);
            auto [b45, b135] = angle_pair(b, f, d, 1, 3);
            CHECK(((std::abs(a45 - b135) < 1e-12 && std::abs(a135 - b45) < 1e-12) ||
                   (std::abs(a45 - b45) < 1e-12 && std::abs(a135 - b135) < 1e-12)));
        }
    }
}
