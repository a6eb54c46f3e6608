#include "radml/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace radml {

void ImageVolume::validate() const {
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0) {
        throw DataError("image volume has a zero dimension");
    }
    if (voxels.size() != size()) {
        throw DataError("image voxel count does not match dims");
    }
    for (double s : spacing) {
        if (!(s > 0.0) || !std::isfinite(s)) throw DataError("image spacing must be positive and finite");
    }
    for (double v : voxels) {
        if (!std::isfinite(v)) throw DataError("image contains non-finite voxels");
    }
}

std::size_t RoiMask::foreground_count() const {
    std::size_t n = 0;
    for (auto v : voxels) n += (v != 0);
    return n;
}

void RoiMask::validate() const {
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0) {
        throw DataError("mask has a zero dimension");
    }
    if (voxels.size() != size()) {
        throw DataError("mask voxel count does not match dims");
    }
    if (foreground_count() == 0) {
        throw DataError("mask has no foreground voxels");
    }
}

void check_paired(const ImageVolume& image, const RoiMask& mask) {
    if (image.dims != mask.dims) {
        throw DataError("image/mask dimension mismatch");
    }
    for (int i = 0; i < 3; ++i) {
        if (image.spacing[i] != mask.spacing[i]) {
            throw DataError("image/mask spacing mismatch");
        }
    }
}

FeatureTable::FeatureTable(std::vector<std::string> patient_ids,
                           std::vector<std::string> feature_names)
    : patient_ids_(std::move(patient_ids)), feature_names_(std::move(feature_names)) {
    values_.assign(patient_ids_.size() * feature_names_.size(), missing_value());
}

void FeatureTable::set_labels(std::vector<int> labels) {
    if (!labels.empty() && labels.size() != n_rows()) {
        throw DataError("label count does not match patient count");
    }
    for (int l : labels) {
        if (l != 0 && l != 1) throw DataError("labels must be 0 or 1");
    }
    labels_ = std::move(labels);
}

int FeatureTable::find_feature(const std::string& name) const {
    auto it = std::find(feature_names_.begin(), feature_names_.end(), name);
    return it == feature_names_.end() ? -1 : static_cast<int>(it - feature_names_.begin());
}

int FeatureTable::find_patient(const std::string& id) const {
    auto it = std::find(patient_ids_.begin(), patient_ids_.end(), id);
    return it == patient_ids_.end() ? -1 : static_cast<int>(it - patient_ids_.begin());
}

FeatureTable FeatureTable::select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (auto r : rows) ids.push_back(patient_ids_.at(r));
    FeatureTable out(std::move(ids), feature_names_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < n_cols(); ++c) out.set(i, c, get(rows[i], c));
    }
    if (has_labels()) {
        std::vector<int> lab;
        lab.reserve(rows.size());
        for (auto r : rows) lab.push_back(labels_.at(r));
        out.set_labels(std::move(lab));
    }
    return out;
}

FeatureTable FeatureTable::select_columns(const std::vector<std::size_t>& cols) const {
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (auto c : cols) names.push_back(feature_names_.at(c));
    FeatureTable out(patient_ids_, std::move(names));
    for (std::size_t r = 0; r < n_rows(); ++r) {
        for (std::size_t i = 0; i < cols.size(); ++i) out.set(r, i, get(r, cols[i]));
    }
    if (has_labels()) out.set_labels(labels_);
    return out;
}

void FeatureTable::append_column(const std::string& name, const std::vector<double>& column) {
    if (column.size() != n_rows()) throw DataError("appended column has wrong length");
    std::vector<double> next;
    next.reserve(n_rows() * (n_cols() + 1));
    for (std::size_t r = 0; r < n_rows(); ++r) {
        for (std::size_t c = 0; c < n_cols(); ++c) next.push_back(get(r, c));
        next.push_back(column[r]);
    }
    feature_names_.push_back(name);
    values_ = std::move(next);
}

void FeatureTable::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& id : patient_ids_) {
        if (!seen.insert(id).second) throw DataError("duplicate patient id: " + id);
    }
    seen.clear();
    for (const auto& f : feature_names_) {
        if (!seen.insert(f).second) throw DataError("duplicate feature name: " + f);
    }
    if (values_.size() != n_rows() * n_cols()) {
        throw DataError("feature table storage size mismatch");
    }
}

} // namespace radml
