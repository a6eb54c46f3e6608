#pragma once

#include "radml/types.hpp"

#include <cstdint>
#include <vector>

namespace radml::phantom {

/// Knobs controlling how separable the two classes are. With every contrast
/// knob at zero the two classes are drawn from the same distribution.
struct PhantomSpec {
    int n_per_class = 30;
    std::array<std::size_t, 3> dims{32, 32, 32};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    double radius_min = 5.0; // lesion semi-axes, voxels
    double radius_max = 9.0;

    // class-1 lesion signature
    double necrotic_core_fraction = 0.0;  // low-intensity center, fraction of radius
    double texture_noise_amplitude = 0.0; // band-limited in-mask noise
    double intensity_offset = 0.0;        // additive shift of the lesion
    double lobulation_amplitude = 0.0;    // sinusoidal boundary modulation

    // additive intensity offset per simulated scanner batch; empty = one batch
    std::vector<double> batch_shifts;

    std::uint64_t master_seed = 0;

    void validate() const;
};

struct PhantomPatient {
    PatientRecord record; // image_path/mask_path left empty; the CLI fills them
    ImageVolume image;
    RoiMask mask;
};

/// 2 * n_per_class patients, deterministic in (spec, master_seed); patient i
/// draws from an independent stream, so generation may run in parallel.
std::vector<PhantomPatient> generate_dataset(const PhantomSpec& spec);

/// Simulated second observer: each boundary voxel (inside or outside) flips
/// with probability `magnitude`; the largest connected component is kept.
/// Throws DataError when the perturbation empties the mask.
RoiMask perturb_mask(const RoiMask& mask, double magnitude, std::uint64_t seed);

} // namespace radml::phantom
