#pragma once

#include "radml/types.hpp"

namespace radml::features::detail {

struct MeshResult {
    double surface_area = 0.0; // mm^2
    double volume = 0.0;       // mm^3
    bool valid = false;        // false when the mask is too small to mesh
};

/// Triangulates the 0.5 level set of a lightly smoothed occupancy field with
/// marching tetrahedra and returns total surface area and enclosed volume.
MeshResult mask_mesh(const RoiMask& mask);

} // namespace radml::features::detail
