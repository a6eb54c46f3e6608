#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace radml {

/// The 13 first-order statistics applied to a set of scalars, in canonical
/// order: min, max, mean, median, std, skewness, kurtosis, peak,
/// peak position, range, energy, quartile range, entropy.
///
/// Conventions: std is the population standard deviation; skewness and
/// (excess) kurtosis are 0 for zero-variance input; peak is the count in the
/// fullest bin of a fixed 50-bin histogram over [min, max] and peak position
/// that bin's center; energy is the sum of squares; quartile range is
/// P75 - P25 (linear interpolation); entropy is Shannon entropy (log2) of the
/// normalized 50-bin histogram.
struct StatVector13 {
    double min = 0, max = 0, mean = 0, median = 0, std_dev = 0;
    double skewness = 0, kurtosis = 0;
    double peak = 0, peak_position = 0;
    double range = 0, energy = 0, quartile_range = 0, entropy = 0;

    std::array<double, 13> as_array() const {
        return {min,  max,  mean,   median,        std_dev, skewness, kurtosis,
                peak, peak_position, range, energy, quartile_range, entropy};
    }
};

/// Computes the 13 statistics. Input must be non-empty and finite.
StatVector13 stats13(const std::vector<double>& values);

/// Percentile with linear interpolation between order statistics, p in [0,100].
double percentile(std::vector<double> values, double p);

/// Equal-width quantization of values into [0, n_levels) between the input
/// min and max. The max value clamps into the top bin; constant input maps
/// everything to level 0.
std::vector<int> quantize(const std::vector<double>& values, int n_levels = 16);

} // namespace radml
