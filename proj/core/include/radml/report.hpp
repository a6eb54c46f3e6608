#pragma once

#include "radml/evaluate.hpp"

#include <string>

namespace radml::report {

/// Full report JSON: {"schema_version", "config", "results",
/// "determinism_hash", "meta"}. The hashed region is config + results; meta
/// (timestamp, runtime, thread count) stays outside it.
std::string to_json(const eval::EvaluationReport& report);
eval::EvaluationReport from_json(const std::string& text);

void write_report(const eval::EvaluationReport& report, const std::string& path);
eval::EvaluationReport read_report(const std::string& path);

/// Canonical serialization of the deterministic region (config + results).
std::string determinism_region(const eval::EvaluationReport& report);
std::uint64_t determinism_hash(const eval::EvaluationReport& report);

/// Formats one metric cell: "0.74 [0.67, 0.81]", with out-of-range bounds
/// rendered as "<0.00" / ">1.00".
std::string format_metric(const stats::Interval& interval);

/// Human-readable table of the report's metrics with confidence intervals.
std::string render_table(const eval::EvaluationReport& report);

/// ROC mean curve + band as CSV (fpr, mean_tpr, lower, upper).
std::string roc_csv(const eval::EvaluationReport& report);

} // namespace radml::report
