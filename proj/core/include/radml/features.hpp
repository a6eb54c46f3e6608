#pragma once

#include "radml/stats13.hpp"
#include "radml/types.hpp"

#include <string>
#include <vector>

namespace radml::features {

/// Intensity statistics over all in-mask voxels (3-D pooled). 13 values.
std::vector<double> histogram_features(const ImageVolume& image, const RoiMask& mask);

/// Morphology of the mask: per-slice 2-D descriptors aggregated over slices,
/// plus 3-D measurements (volumes, axes, diameters, meshed surface).
/// 35 values; physical units come from the mask spacing.
std::vector<double> shape_features(const RoiMask& mask);

/// Principal-axis angles versus the grid axes plus center of mass in voxel
/// indices and millimeters. 9 values. Degenerate principal axes (equal top
/// eigenvalues, e.g. a sphere) report angles of 0.
std::vector<double> orientation_features(const RoiMask& mask);

/// Gray-level co-occurrence features: 6 statistics x {summed-slices, per-slice
/// mean, per-slice std} x 4 angles x 2 distances = 144 values. Pixels are
/// quantized to 16 levels over the pooled 3-D ROI range.
/// Throws DegenerateWorkflow-free errors: a mask with no co-occurring in-mask
/// pixel pair anywhere raises DataError.
std::vector<double> glcm_features(const ImageVolume& image, const RoiMask& mask);

/// Size-zone (16), run-length (16), dependence (14) and neighborhood
/// gray-tone difference (5) features, aggregated over slices by matrix
/// summation. Returned concatenated in that order (51 values).
std::vector<double> matrix_family_features(const ImageVolume& image, const RoiMask& mask);

/// Filter-bank features: each filter runs per axial slice on the slice
/// content around the lesion (mirror-padded), then the 13 statistics are
/// computed over filtered values of in-mask pixels pooled across slices.
/// LBP 39, Gabor 156, LoG 39, vessel 39, local phase 39 (312 values, in
/// canonical dictionary order).
std::vector<double> filter_bank_features(const ImageVolume& image, const RoiMask& mask);

/// The full canonical 564-vector, ordered as canonical_feature_names().
/// Features whose computation degenerates (e.g. correlation of a constant
/// ROI) are the missing sentinel rather than an error.
std::vector<double> extract_all(const ImageVolume& image, const RoiMask& mask);

/// Pixels farther than this many pixels from the mask bounding box can never
/// influence filter-bank features (spatial kernels are truncated below it and
/// spectral filters operate on this window).
inline constexpr int kFilterContextMargin = 32;

} // namespace radml::features
