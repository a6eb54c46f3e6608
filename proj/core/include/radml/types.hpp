#pragma once

#include "radml/common.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace radml {

/// On-disk element type of a volume; preserved so write/read round-trips are
/// bit-identical.
enum class ElementKind : std::uint8_t { Short, Float, Uchar };

/// 3-D scalar voxel grid with physical spacing. Voxels are stored as doubles
/// in x-fastest order; the slice axis is the third index (axial).
struct ImageVolume {
    std::array<std::size_t, 3> dims{0, 0, 0};   // nx, ny, nz
    std::array<double, 3> spacing{1.0, 1.0, 1.0}; // millimeters
    std::vector<double> voxels;                  // nx*ny*nz, x fastest
    ElementKind element_kind = ElementKind::Float;

    std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
        return x + dims[0] * (y + dims[1] * z);
    }
    double& at(std::size_t x, std::size_t y, std::size_t z) { return voxels[index(x, y, z)]; }
    double at(std::size_t x, std::size_t y, std::size_t z) const { return voxels[index(x, y, z)]; }

    /// Throws DataError unless dims/spacing/voxel-count/finiteness invariants hold.
    void validate() const;
};

/// Binary voxel grid aligned to an ImageVolume.
struct RoiMask {
    std::array<std::size_t, 3> dims{0, 0, 0};
    std::array<double, 3> spacing{1.0, 1.0, 1.0};
    std::vector<std::uint8_t> voxels; // 0 or 1

    std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
    std::size_t index(std::size_t x, std::size_t y, std::size_t z) const {
        return x + dims[0] * (y + dims[1] * z);
    }
    bool at(std::size_t x, std::size_t y, std::size_t z) const {
        return voxels[index(x, y, z)] != 0;
    }
    void set(std::size_t x, std::size_t y, std::size_t z, bool v) {
        voxels[index(x, y, z)] = v ? 1 : 0;
    }
    std::size_t foreground_count() const;

    /// Non-empty, dims consistent with the voxel buffer.
    void validate() const;
};

/// Throws DataError if image and mask disagree on dims or spacing.
void check_paired(const ImageVolume& image, const RoiMask& mask);

/// One row of the dataset manifest.
struct PatientRecord {
    std::string id;
    int label = 0;                       // 0 or 1; positive class = 1
    std::optional<double> age;
    std::optional<char> sex;             // 'M' or 'F'
    std::optional<std::string> location; // categorical code
    std::optional<std::string> batch;    // scanner / protocol group
    std::string image_path;
    std::string mask_path;
};

/// Patients x named-features matrix. Missing cells are quiet NaN.
/// Labels are optional (joined from the manifest when needed).
class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(std::vector<std::string> patient_ids, std::vector<std::string> feature_names);

    std::size_t n_rows() const { return patient_ids_.size(); }
    std::size_t n_cols() const { return feature_names_.size(); }

    const std::vector<std::string>& patient_ids() const { return patient_ids_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    double get(std::size_t row, std::size_t col) const { return values_[row * n_cols() + col]; }
    void set(std::size_t row, std::size_t col, double v) { values_[row * n_cols() + col] = v; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    bool has_labels() const { return !labels_.empty(); }
    const std::vector<int>& labels() const { return labels_; }
    void set_labels(std::vector<int> labels);

    /// Index of a feature by name, or -1 when absent.
    int find_feature(const std::string& name) const;
    /// Index of a patient by id, or -1 when absent.
    int find_patient(const std::string& id) const;

    /// New table restricted to the given row indices (order preserved).
    FeatureTable select_rows(const std::vector<std::size_t>& rows) const;
    /// New table restricted to the given column indices (order preserved).
    FeatureTable select_columns(const std::vector<std::size_t>& cols) const;

    /// Appends a column; the value vector must have one entry per row.
    void append_column(const std::string& name, const std::vector<double>& column);

    /// Throws DataError on duplicate ids or duplicate feature names.
    void validate() const;

private:
    std::vector<std::string> patient_ids_;
    std::vector<std::string> feature_names_;
    std::vector<double> values_; // row-major
    std::vector<int> labels_;
};

} // namespace radml
