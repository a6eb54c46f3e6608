#include "radml/features.hpp"

#include "texture_common.hpp"

#include <cmath>

namespace radml::features {

namespace detail {

LevelSlices quantize_roi(const ImageVolume& image, const RoiMask& mask, int n_levels) {
    check_paired(image, mask);
    std::vector<double> roi_values;
    roi_values.reserve(mask.foreground_count());
    for (std::size_t i = 0; i < mask.voxels.size(); ++i) {
        if (mask.voxels[i]) roi_values.push_back(image.voxels[i]);
    }
    if (roi_values.empty()) throw DataError("quantize_roi of an empty mask");
    std::vector<int> levels = quantize(roi_values, n_levels);

    // Matrix features operate on the ranks of the occupied bins, so that the
    // two levels of a binary ROI are adjacent.
    std::vector<int> rank(static_cast<std::size_t>(n_levels), -1);
    for (int l : levels) rank[static_cast<std::size_t>(l)] = 0;
    int next = 0;
    for (auto& r : rank) {
        if (r == 0) r = next++;
    }
    for (auto& l : levels) l = rank[static_cast<std::size_t>(l)];

    LevelSlices out;
    out.nx = image.dims[0];
    out.ny = image.dims[1];
    out.nz = image.dims[2];
    out.n_levels = n_levels;
    out.n_pixels = roi_values.size();
    out.grids.assign(out.nz, std::vector<int>(out.nx * out.ny, -1));
    std::size_t k = 0;
    for (std::size_t z = 0; z < out.nz; ++z) {
        for (std::size_t y = 0; y < out.ny; ++y) {
            for (std::size_t x = 0; x < out.nx; ++x) {
                if (mask.at(x, y, z)) out.grids[z][y * out.nx + x] = levels[k++];
            }
        }
    }
    return out;
}

} // namespace detail

namespace {

using detail::kAngleSteps;
using detail::LevelSlices;

constexpr int kLevels = 16;

/// Symmetric co-occurrence counts for one slice / angle / distance.
/// Returns the number of ordered source pairs found (before symmetrization).
std::size_t accumulate_pairs(const LevelSlices& ls, std::size_t z, int angle, int distance,
                             std::vector<double>& counts) {
    const int dx = kAngleSteps[angle][0] * distance;
    const int dy = kAngleSteps[angle][1] * distance;
    const auto& grid = ls.grids[z];
    const int nx = static_cast<int>(ls.nx), ny = static_cast<int>(ls.ny);
    std::size_t pairs = 0;
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const int a = grid[static_cast<std::size_t>(y) * ls.nx + x];
            if (a < 0) continue;
            const int x2 = x + dx, y2 = y + dy;
            if (x2 < 0 || x2 >= nx || y2 < 0 || y2 >= ny) continue;
            const int b = grid[static_cast<std::size_t>(y2) * ls.nx + x2];
            if (b < 0) continue;
            counts[static_cast<std::size_t>(a) * kLevels + b] += 1.0;
            counts[static_cast<std::size_t>(b) * kLevels + a] += 1.0;
            ++pairs;
        }
    }
    return pairs;
}

struct GlcmValues {
    double contrast = 0, dissimilarity = 0, homogeneity = 0, asm_value = 0, energy = 0;
    double correlation = 0;
    bool correlation_defined = true;
};

GlcmValues glcm_statistics(const std::vector<double>& counts) {
    double total = 0.0;
    for (double c : counts) total += c;
    GlcmValues v;
    double mu_i = 0, mu_j = 0;
    for (int i = 0; i < kLevels; ++i) {
        for (int j = 0; j < kLevels; ++j) {
            const double p = counts[static_cast<std::size_t>(i) * kLevels + j] / total;
            if (p == 0.0) continue;
            const double d = std::abs(i - j);
            v.contrast += p * d * d;
            v.dissimilarity += p * d;
            v.homogeneity += p / (1.0 + d * d);
            v.asm_value += p * p;
            mu_i += p * i;
            mu_j += p * j;
        }
    }
    v.energy = v.asm_value; // both names of the second angular moment are emitted
    double var_i = 0, var_j = 0, cov = 0;
    for (int i = 0; i < kLevels; ++i) {
        for (int j = 0; j < kLevels; ++j) {
            const double p = counts[static_cast<std::size_t>(i) * kLevels + j] / total;
            if (p == 0.0) continue;
            var_i += p * (i - mu_i) * (i - mu_i);
            var_j += p * (j - mu_j) * (j - mu_j);
            cov += p * (i - mu_i) * (j - mu_j);
        }
    }
    if (var_i > 0.0 && var_j > 0.0) {
        v.correlation = cov / std::sqrt(var_i * var_j);
    } else {
        v.correlation_defined = false;
    }
    return v;
}

double pick(const GlcmValues& v, int feature, bool& defined) {
    defined = true;
    switch (feature) {
        case 0: return v.contrast;
        case 1: return v.dissimilarity;
        case 2: return v.homogeneity;
        case 3: return v.asm_value;
        case 4: return v.energy;
        default:
            defined = v.correlation_defined;
            return v.correlation;
    }
}

} // namespace

std::vector<double> glcm_features(const ImageVolume& image, const RoiMask& mask) {
    const LevelSlices ls = detail::quantize_roi(image, mask, kLevels);
    constexpr int kDistances[2] = {1, 3};

    // summed[d][a]: counts accumulated over slices; per_slice[d][a]: per-slice values.
    std::vector<double> summed[2][4];
    std::vector<GlcmValues> per_slice[2][4];
    bool any_pair = false;
    for (int d = 0; d < 2; ++d) {
        for (int a = 0; a < 4; ++a) summed[d][a].assign(kLevels * kLevels, 0.0);
    }
    for (std::size_t z = 0; z < ls.nz; ++z) {
        for (int d = 0; d < 2; ++d) {
            for (int a = 0; a < 4; ++a) {
                std::vector<double> counts(kLevels * kLevels, 0.0);
                const std::size_t pairs = accumulate_pairs(ls, z, a, kDistances[d], counts);
                if (pairs == 0) continue;
                any_pair = true;
                for (std::size_t k = 0; k < counts.size(); ++k) summed[d][a][k] += counts[k];
                per_slice[d][a].push_back(glcm_statistics(counts));
            }
        }
    }
    if (!any_pair) throw DataError("no co-occurring in-mask pixel pair in any slice");

    // Dictionary order: feature -> distance -> angle -> {summed, ms mean, ms std}.
    std::vector<double> out;
    out.reserve(144);
    for (int f = 0; f < 6; ++f) {
        for (int d = 0; d < 2; ++d) {
            for (int a = 0; a < 4; ++a) {
                double normal = missing_value();
                bool normal_defined = false;
                double total = 0.0;
                for (double c : summed[d][a]) total += c;
                if (total > 0.0) {
                    const GlcmValues v = glcm_statistics(summed[d][a]);
                    normal = pick(v, f, normal_defined);
                }
                out.push_back(normal_defined ? normal : missing_value());

                double mean = missing_value(), stdev = missing_value();
                std::vector<double> slice_values;
                for (const auto& v : per_slice[d][a]) {
                    bool defined = false;
                    const double value = pick(v, f, defined);
                    if (defined) slice_values.push_back(value);
                }
                if (!slice_values.empty()) {
                    double m = 0.0;
                    for (double v : slice_values) m += v;
                    m /= static_cast<double>(slice_values.size());
                    double s2 = 0.0;
                    for (double v : slice_values) s2 += (v - m) * (v - m);
                    s2 /= static_cast<double>(slice_values.size());
                    mean = m;
                    stdev = std::sqrt(s2);
                }
                out.push_back(mean);
                out.push_back(stdev);
            }
        }
    }
    return out;
}

} // namespace radml::features
