#pragma once

#include "radml/search.hpp"
#include "radml/stats_tests.hpp"

#include <functional>
#include <optional>
#include <string>

namespace radml::eval {

enum class SplitMode { RandomSplit, LeaveOneOut };

/// Per-iteration train/test partition of the dataset rows.
struct SplitPlan {
    SplitMode mode = SplitMode::RandomSplit;
    double test_fraction = 0.2;
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> iterations;
};

/// Stratified random splits: per-class test counts are floors of the
/// proportional share, with leftover slots (up to the rounded total) going to
/// the largest fractional remainders. Leave-one-out mode emits one iteration
/// per patient. Throws DataError when a class has fewer than 2 members in
/// random-split mode.
SplitPlan make_split_plan(const std::vector<int>& labels, int n_iter, double test_fraction,
                          std::uint64_t seed, SplitMode mode = SplitMode::RandomSplit);

double bca(double sensitivity, double specificity);

struct ConfusionMetrics {
    double sensitivity = 0;
    double specificity = 0;
    double bca = 0;
};
ConfusionMetrics confusion_metrics(const std::vector<double>& scores,
                                   const std::vector<int>& labels, double threshold = 0.5);

struct RocCurve {
    std::vector<double> fpr, tpr; // staircase vertices from (0,0) to (1,1)
};
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

/// Fixed-width band: curves are resampled onto a common 101-point FPR grid;
/// the half-width is the smallest w such that at least `level` of the curves
/// lie entirely within +-w of the pointwise mean curve.
struct RocBand {
    std::vector<double> fpr_grid, mean_tpr;
    double half_width = 0;
};
RocBand roc_band(const std::vector<RocCurve>& curves, double level = 0.95);

struct PatientStat {
    std::string id;
    int tested = 0;
    int correct = 0;
};

struct Typicality {
    std::vector<std::string> typical;   // correct in every appearance
    std::vector<std::string> atypical;  // correct in none
    std::vector<std::pair<std::string, double>> ambiguous; // closest to 50%, with fraction
    std::vector<std::string> never_tested;                 // excluded, reported as a warning
};
Typicality rank_typicality(const std::vector<PatientStat>& stats);

struct IterationMetrics {
    double auc = 0, bca = 0, sensitivity = 0, specificity = 0;
};

struct ExperimentSettings {
    std::size_t budget = 25000;
    std::size_t ensemble_size = 50;
    int inner_folds = 5;
    double inner_validation_fraction = 0.15;
    std::uint64_t seed = 0;
    int threads = 0;
    std::optional<std::string> combat_group; // harmonize per iteration when set
};

struct EvaluationReport {
    // configuration echo (part of the hashed region)
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    std::size_t ensemble_size = 0;
    int inner_folds = 5;
    double inner_validation_fraction = 0.15;
    int n_iterations = 0;
    double test_fraction = 0.2;
    std::string split_mode;
    std::string combat_group; // empty when off
    std::vector<std::string> feature_names;

    // results (part of the hashed region)
    std::vector<IterationMetrics> iterations;
    stats::Interval ci_auc, ci_bca, ci_sensitivity, ci_specificity;
    RocBand roc;
    std::vector<PatientStat> per_patient;
    Typicality typicality;
    std::vector<std::uint64_t> fitted_hashes; // per iteration, hygiene trace

    // meta (excluded from the hashed region)
    double runtime_seconds = 0;
    int threads = 0;
    std::string timestamp;
};

/// The outer cross-validation harness: per iteration the full workflow search
/// runs on the training part only, the ensemble scores the test part, and
/// metrics accumulate. Per-iteration failures abort with the iteration index.
/// `batches` (aligned with table rows) is only consulted when settings
/// request ComBat.
EvaluationReport run_experiment(const FeatureTable& table,
                                const std::vector<std::string>& batches, const SplitPlan& plan,
                                const pipeline::SearchSpace& space,
                                const ExperimentSettings& settings);

} // namespace radml::eval
