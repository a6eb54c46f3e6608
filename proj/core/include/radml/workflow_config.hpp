#pragma once

#include "radml/rng.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace radml::pipeline {

enum class ImputerKind { Mean, Median, MostFrequent, Knn };
enum class PcaMode { Off, Variance95, FixedK };
enum class ResamplerKind {
    None,
    RandomOver,
    RandomUnder,
    NearMiss,
    NeighborhoodCleaning,
    Adasyn,
    Smote,
    SmoteBorderline,
    SmoteTomek,
    SmoteEnn
};
enum class ClassifierKind { Logistic, Svm, RandomForest, NaiveBayes, Lda, Qda };
enum class SvmKernel { Linear, Rbf };

const char* to_string(ImputerKind k);
const char* to_string(PcaMode m);
const char* to_string(ResamplerKind k);
const char* to_string(ClassifierKind k);
const char* to_string(SvmKernel k);

/// One sampled point in the workflow space. Serializable and hashable so any
/// run can be reproduced exactly.
struct WorkflowConfig {
    ImputerKind imputer = ImputerKind::Mean;
    int knn_k = 5;

    bool scaler_on = true;

    // group on/off flags, keyed by group tag present in the table
    std::map<std::string, bool> group_flags;

    bool univariate_on = false;
    double univariate_p = 0.05;

    PcaMode pca_mode = PcaMode::Off;
    int pca_k = 25;

    ResamplerKind resampler = ResamplerKind::None;
    int near_miss_version = 1;

    ClassifierKind classifier = ClassifierKind::Logistic;
    double logistic_lambda = 1.0;
    SvmKernel svm_kernel = SvmKernel::Rbf;
    double svm_c = 1.0;
    double svm_gamma = 0.01;
    int rf_trees = 100;
    int rf_depth = 8;
    double da_ridge = 0.0;

    std::uint64_t config_index = 0;
    std::uint64_t rng_stream = 0;

    std::string to_json() const;
    static WorkflowConfig from_json(const std::string& json);
    std::uint64_t hash() const;
};

/// The declared sampling distributions of every workflow field, loaded from
/// the versioned search-space JSON document.
struct SearchSpace {
    int version = 1;
    std::vector<ImputerKind> imputer_kinds;
    int knn_k_min = 2, knn_k_max = 7;
    double scaler_on_probability = 1.0;
    double group_on_probability = 0.5;
    double univariate_on_probability = 0.5;
    double univariate_p_min = 0.01, univariate_p_max = 0.10;
    double pca_off_probability = 0.6, pca_variance95_probability = 0.2,
           pca_fixed_k_probability = 0.2;
    int pca_k_min = 10, pca_k_max = 50;
    double resampler_none_probability = 0.5;
    std::vector<ResamplerKind> resampler_kinds;
    int near_miss_min = 1, near_miss_max = 3;
    std::vector<ClassifierKind> classifier_kinds;
    double logistic_lambda_min = 1e-3, logistic_lambda_max = 1e3;
    std::vector<SvmKernel> svm_kernels;
    double svm_c_min = 1e-2, svm_c_max = 1e3;
    double svm_gamma_min = 1e-4, svm_gamma_max = 10.0;
    int rf_trees_min = 10, rf_trees_max = 200;
    int rf_depth_min = 2, rf_depth_max = 20;
    double da_ridge_min = 0.0, da_ridge_max = 1.0;

    static SearchSpace from_json(const std::string& json);
    static SearchSpace builtin_default();

    /// Config i is a pure function of (master_seed, i) and the group tags
    /// present in the data.
    WorkflowConfig sample(std::uint64_t master_seed, std::uint64_t index,
                          const std::vector<std::string>& group_tags) const;
};

} // namespace radml::pipeline
