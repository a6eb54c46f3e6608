#include "radml/feature_dictionary.hpp"
#include "radml/features.hpp"

namespace radml::features {

std::vector<double> extract_all(const ImageVolume& image, const RoiMask& mask) {
    check_paired(image, mask);
    mask.validate();

    std::vector<double> out;
    out.reserve(564);

    auto append = [&](const std::vector<double>& v) { out.insert(out.end(), v.begin(), v.end()); };
    auto append_or_missing = [&](std::size_t count, auto&& fn) {
        // Degenerate geometry (e.g. no co-occurring pair) yields the missing
        // sentinel for the whole family; imputation handles it downstream.
        try {
            append(fn());
        } catch (const DataError&) {
            out.insert(out.end(), count, missing_value());
        }
    };

    append(histogram_features(image, mask));
    append(shape_features(mask));
    append(orientation_features(mask));
    append_or_missing(144, [&] { return glcm_features(image, mask); });
    append_or_missing(51, [&] { return matrix_family_features(image, mask); });
    append_or_missing(312, [&] { return filter_bank_features(image, mask); });

    if (out.size() != canonical_feature_names().size()) {
        throw DataError("extract_all produced " + std::to_string(out.size()) + " features");
    }
    return out;
}

} // namespace radml::features
