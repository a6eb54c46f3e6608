#pragma once

#include "radml/pipeline.hpp"

#include <limits>

namespace radml::search {

struct ScoredWorkflow {
    pipeline::WorkflowConfig config;
    double mean_f1 = -std::numeric_limits<double>::infinity();
    std::vector<double> fold_f1;
    bool degenerate = false;
};

/// n configs drawn independently from the space; config i is a pure function
/// of (master_seed, i), so a smaller budget samples a prefix of a larger one.
std::vector<pipeline::WorkflowConfig> sample_workflows(const pipeline::SearchSpace& space,
                                                       std::size_t n, std::uint64_t master_seed,
                                                       const std::vector<std::string>& group_tags);

/// Stratified random train/validation splits shared by every candidate
/// workflow of one (outer) training set.
struct InnerSplits {
    std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> folds;
};
InnerSplits make_inner_splits(const std::vector<int>& labels, int n_folds,
                              double validation_fraction, std::uint64_t seed);

/// F1 of the positive class at probability threshold 0.5.
double f1_score(const std::vector<int>& truth, const std::vector<int>& predicted);

/// Fits the config on each fold's training part and scores the validation
/// part; degenerate configurations come back flagged with score -infinity
/// instead of throwing.
ScoredWorkflow score_workflow(const pipeline::WorkflowConfig& config, const FeatureTable& train,
                              const InnerSplits& splits);

struct EnsembleModel {
    struct Member {
        pipeline::WorkflowConfig config;
        pipeline::FittedPipeline fitted;
        double mean_f1 = 0.0;
    };
    std::vector<Member> members;
    std::vector<std::string> feature_contract;
    std::size_t requested_size = 50;
};

/// Top k workflows by (mean F1, then lower config index), re-trained on the
/// full training table. Throws DataError when every workflow is degenerate.
EnsembleModel build_ensemble(const std::vector<ScoredWorkflow>& scored, std::size_t k,
                             const FeatureTable& train, int threads = 0);

/// Arithmetic mean of the members' positive-class probabilities.
pipeline::Vector ensemble_predict(const EnsembleModel& model, const FeatureTable& rows);

/// Samples, scores (in parallel) and ensembles in one call.
struct SearchSettings {
    std::size_t budget = 25000;
    std::size_t ensemble_size = 50;
    int inner_folds = 5;
    double inner_validation_fraction = 0.15;
    std::uint64_t master_seed = 0;
    std::uint64_t inner_split_seed = 0;
    int threads = 0;
};
EnsembleModel run_search(const FeatureTable& train, const pipeline::SearchSpace& space,
                         const SearchSettings& settings);

} // namespace radml::search
