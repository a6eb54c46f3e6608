#include "radml/features.hpp"

namespace radml::features {

std::vector<double> histogram_features(const ImageVolume& image, const RoiMask& mask) {
    check_paired(image, mask);
    std::vector<double> values;
    values.reserve(mask.foreground_count());
    for (std::size_t i = 0; i < mask.voxels.size(); ++i) {
        if (mask.voxels[i]) values.push_back(image.voxels[i]);
    }
    if (values.empty()) throw DataError("histogram features of an empty mask");
    auto s = stats13(values);
    const auto a = s.as_array();
    return std::vector<double>(a.begin(), a.end());
}

} // namespace radml::features
