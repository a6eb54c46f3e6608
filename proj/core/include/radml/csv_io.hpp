#pragma once

#include "radml/types.hpp"

#include <string>
#include <vector>

namespace radml {

/// FeatureTable CSV: UTF-8, LF line endings, first column `patient_id`,
/// '.' decimal separator, missing cells as the literal token NaN.
/// Values survive a round-trip to 12 significant digits.
void write_feature_table(const FeatureTable& table, const std::string& path);
FeatureTable read_feature_table(const std::string& path);

/// Manifest CSV with columns
/// patient_id,label,age,sex,location,batch,image_path,mask_path
/// (empty cell = missing). Relative image/mask paths are resolved against
/// the manifest's directory.
void write_manifest(const std::vector<PatientRecord>& records, const std::string& path);
std::vector<PatientRecord> read_manifest(const std::string& path);

/// Two-column CSV (patient_id,score); used by `predict` and `compare`.
void write_scores(const std::vector<std::string>& ids, const std::vector<double>& scores,
                  const std::string& path, const std::string& value_column = "score");
void read_scores(const std::string& path, std::vector<std::string>& ids, std::vector<double>& scores);

/// Formats a double the way all CSV writers do (12 significant digits,
/// NaN for missing).
std::string format_value(double v);

} // namespace radml
