#pragma once

#include "radml/rng.hpp"
#include "radml/types.hpp"
#include "radml/workflow_config.hpp"

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace radml::pipeline {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Row-major FeatureTable values as an Eigen matrix (missing cells are NaN).
Matrix table_matrix(const FeatureTable& table);

// ------------------------------------------------------------- scaling -----

/// Robust z-score: per-feature mean/std over values within [P5, P95];
/// zero std uses divisor 1. Missing values are ignored when fitting and
/// stay missing when applied.
struct FittedScaler {
    Vector center, scale;
};
FittedScaler fit_robust_zscore(const Matrix& x);
Matrix apply_scaler(const FittedScaler& s, const Matrix& x);

// ----------------------------------------------------------- imputation ----

struct FittedImputer {
    ImputerKind kind = ImputerKind::Mean;
    int k = 5;
    Vector fill;   // per-feature replacement for mean/median/most-frequent
    Matrix donors; // training rows for the knn variant
};
FittedImputer fit_imputer(const Matrix& x, ImputerKind kind, int k = 5);
Matrix apply_imputer(const FittedImputer& imp, const Matrix& x);

// ------------------------------------------------------------ selection ----

/// Columns with variance >= 0.01; throws DegenerateWorkflow when none remain.
std::vector<int> variance_threshold(const Matrix& x);

/// Columns whose group flag is on. The flags must cover every group present.
/// The volume sub-group is selectable on its own: a column survives when its
/// primary group flag is on or when it belongs to an enabled sub-group.
std::vector<int> groupwise_select(const std::vector<std::string>& feature_names,
                                  const std::map<std::string, bool>& flags);

/// Columns whose two-sided Mann-Whitney p-value is below the threshold.
std::vector<int> univariate_select(const Matrix& x, const std::vector<int>& y, double p_threshold);

// ------------------------------------------------------------------ pca ----

struct FittedPca {
    Vector mean;
    Matrix basis; // d x k, orthonormal columns
};
FittedPca fit_pca(const Matrix& x, PcaMode mode, int fixed_k);
Matrix apply_pca(const FittedPca& p, const Matrix& x);

// ------------------------------------------------------------ resampling ---

struct ResampleResult {
    Matrix x;
    std::vector<int> y;
    std::vector<std::string> notes; // e.g. fallback records
};
/// Balances or cleans the training set. k-neighbor methods fall back to
/// random over-sampling when the minority class is too small (recorded in
/// notes). Throws DataError on single-class input.
ResampleResult resample(const Matrix& x, const std::vector<int>& y, ResamplerKind kind,
                        int near_miss_version, Rng& rng);

// ----------------------------------------------------------- classifiers ---

struct LogisticModel {
    Vector weights; // last entry is the intercept
};
struct SvmModel {
    SvmKernel kernel = SvmKernel::Rbf;
    double gamma = 0.0;
    Matrix support;     // rows = support vectors
    Vector alpha_y;     // alpha_i * y_i
    double bias = 0.0;
    double platt_a = 0.0, platt_b = 0.0;
};
struct TreeNode {
    int feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double leaf_positive_fraction = 0.0;
};
struct ForestModel {
    std::vector<std::vector<TreeNode>> trees;
};
struct NaiveBayesModel {
    double prior_positive = 0.5;
    Vector mean0, mean1, var0, var1;
};
struct DiscriminantModel {
    bool quadratic = false;
    double prior_positive = 0.5;
    Vector mean0, mean1;
    Matrix cov_inv0, cov_inv1; // shared matrix stored twice for LDA
    double log_det0 = 0.0, log_det1 = 0.0;
};
using ClassifierModel =
    std::variant<LogisticModel, SvmModel, ForestModel, NaiveBayesModel, DiscriminantModel>;

/// Trains the classifier named by the config on (x, y); deterministic given
/// the config's rng stream.
ClassifierModel train_classifier(const WorkflowConfig& config, const Matrix& x,
                                 const std::vector<int>& y);

/// Positive-class probability per row, each in [0, 1].
Vector predict_proba(const ClassifierModel& model, const Matrix& x);

// ------------------------------------------------------- whole pipelines ---

/// Everything a trained workflow needs to score unseen rows. Applying a
/// fitted pipeline never consults new data beyond these parameters.
struct FittedPipeline {
    std::vector<std::string> input_features; // expected column names, in order
    std::optional<FittedScaler> scaler;
    FittedImputer imputer;
    std::vector<int> selected; // column indices after scaling/imputation
    std::optional<FittedPca> pca;
    ClassifierModel classifier;
    std::vector<std::string> notes;
};

/// Fits scaling, imputation, selection, PCA, resampling and the classifier on
/// the training table (in that order). Throws DegenerateWorkflow when the
/// configuration leaves no usable feature or the classifier cannot be
/// trained.
FittedPipeline fit_pipeline(const WorkflowConfig& config, const FeatureTable& train);

/// Scores rows that carry the pipeline's feature contract (by name).
Vector pipeline_predict(const FittedPipeline& p, const FeatureTable& rows);

/// Content hash of every fitted parameter; used by the train/test hygiene
/// instrumentation.
std::uint64_t pipeline_param_hash(const FittedPipeline& p);

} // namespace radml::pipeline
