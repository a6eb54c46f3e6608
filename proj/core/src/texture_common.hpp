#pragma once

#include "radml/features.hpp"

#include <vector>

namespace radml::features::detail {

/// In-mask pixels of every axial slice quantized to a common level set
/// (min-max over the pooled 3-D ROI). Background cells are -1.
struct LevelSlices {
    std::size_t nx = 0, ny = 0, nz = 0;
    int n_levels = 16;
    std::vector<std::vector<int>> grids; // nz grids of nx*ny, row-major (y*nx+x)
    std::size_t n_pixels = 0;            // total in-mask pixel count

    int at(std::size_t z, std::size_t x, std::size_t y) const {
        return grids[z][y * nx + x];
    }
};

LevelSlices quantize_roi(const ImageVolume& image, const RoiMask& mask, int n_levels = 16);

/// The four in-plane co-occurrence directions (0, 45, 90, 135 degrees) as
/// (dx, dy) steps with dy growing downward.
inline constexpr int kAngleSteps[4][2] = {{1, 0}, {1, -1}, {0, -1}, {-1, -1}};

} // namespace radml::features::detail
