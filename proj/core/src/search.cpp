#include "radml/search.hpp"

#include "radml/feature_dictionary.hpp"
#include "radml/threading.hpp"

#include <algorithm>
#include <set>

namespace radml::search {

using pipeline::WorkflowConfig;

std::vector<WorkflowConfig> sample_workflows(const pipeline::SearchSpace& space, std::size_t n,
                                             std::uint64_t master_seed,
                                             const std::vector<std::string>& group_tags) {
    if (group_tags.empty()) throw DataError("cannot sample workflows over an empty group set");
    std::vector<WorkflowConfig> configs;
    configs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        configs.push_back(space.sample(master_seed, i, group_tags));
    }
    return configs;
}

InnerSplits make_inner_splits(const std::vector<int>& labels, int n_folds,
                              double validation_fraction, std::uint64_t seed) {
    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? positives : negatives).push_back(i);
    }
    if (positives.empty() || negatives.empty()) {
        throw DataError("inner splits require both classes");
    }
    InnerSplits splits;
    for (int fold = 0; fold < n_folds; ++fold) {
        Rng rng = Rng::derive(seed, "inner-split", {static_cast<std::uint64_t>(fold)});
        std::vector<std::size_t> train, validation;
        for (auto* cls : {&positives, &negatives}) {
            std::vector<std::size_t> shuffled = *cls;
            rng.shuffle(shuffled);
            const auto n_val = static_cast<std::size_t>(
                std::floor(validation_fraction * static_cast<double>(shuffled.size())));
            for (std::size_t i = 0; i < shuffled.size(); ++i) {
                (i < n_val ? validation : train).push_back(shuffled[i]);
            }
        }
        std::sort(train.begin(), train.end());
        std::sort(validation.begin(), validation.end());
        splits.folds.push_back({std::move(train), std::move(validation)});
    }
    return splits;
}

double f1_score(const std::vector<int>& truth, const std::vector<int>& predicted) {
    if (truth.size() != predicted.size()) throw DataError("f1_score length mismatch");
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predicted[i] == 1 && truth[i] == 1) tp += 1;
        else if (predicted[i] == 1) fp += 1;
        else if (truth[i] == 1) fn += 1;
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

ScoredWorkflow score_workflow(const WorkflowConfig& config, const FeatureTable& train,
                              const InnerSplits& splits) {
    ScoredWorkflow result;
    result.config = config;
    try {
        double sum = 0;
        for (const auto& [train_rows, validation_rows] : splits.folds) {
            const FeatureTable fold_train = train.select_rows(train_rows);
            const FeatureTable fold_val = train.select_rows(validation_rows);
            const auto fitted = pipeline::fit_pipeline(config, fold_train);
            const auto probabilities = pipeline::pipeline_predict(fitted, fold_val);
            std::vector<int> predicted;
            predicted.reserve(validation_rows.size());
            for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
                predicted.push_back(probabilities(i) >= 0.5 ? 1 : 0);
            }
            const double f1 = f1_score(fold_val.labels(), predicted);
            result.fold_f1.push_back(f1);
            sum += f1;
        }
        result.mean_f1 = sum / static_cast<double>(splits.folds.size());
    } catch (const DegenerateWorkflow&) {
        result.degenerate = true;
        result.mean_f1 = -std::numeric_limits<double>::infinity();
        result.fold_f1.clear();
    }
    return result;
}

EnsembleModel build_ensemble(const std::vector<ScoredWorkflow>& scored, std::size_t k,
                             const FeatureTable& train, int threads) {
    std::vector<const ScoredWorkflow*> usable;
    for (const auto& s : scored) {
        if (!s.degenerate) usable.push_back(&s);
    }
    if (usable.empty()) throw DataError("every sampled workflow was degenerate");
    std::sort(usable.begin(), usable.end(), [](const ScoredWorkflow* a, const ScoredWorkflow* b) {
        if (a->mean_f1 != b->mean_f1) return a->mean_f1 > b->mean_f1;
        return a->config.config_index < b->config.config_index;
    });
    if (usable.size() > k) usable.resize(k);

    EnsembleModel model;
    model.requested_size = k;
    model.feature_contract = train.feature_names();
    std::vector<std::optional<EnsembleModel::Member>> retrained(usable.size());
    parallel_for(usable.size(), threads, [&](std::size_t i) {
        try {
            EnsembleModel::Member member;
            member.config = usable[i]->config;
            member.mean_f1 = usable[i]->mean_f1;
            member.fitted = pipeline::fit_pipeline(usable[i]->config, train);
            retrained[i] = std::move(member);
        } catch (const DegenerateWorkflow&) {
            retrained[i] = std::nullopt; // degenerate only on the full split
        }
    });
    for (auto& member : retrained) {
        if (member) model.members.push_back(std::move(*member));
    }
    if (model.members.empty()) throw DataError("every selected workflow failed to retrain");
    return model;
}

pipeline::Vector ensemble_predict(const EnsembleModel& model, const FeatureTable& rows) {
    if (rows.feature_names() != model.feature_contract) {
        throw DataError("feature-name contract mismatch between ensemble and table");
    }
    pipeline::Vector mean = pipeline::Vector::Zero(static_cast<Eigen::Index>(rows.n_rows()));
    for (const auto& member : model.members) {
        mean += pipeline::pipeline_predict(member.fitted, rows);
    }
    mean /= static_cast<double>(model.members.size());
    return mean;
}

EnsembleModel run_search(const FeatureTable& train, const pipeline::SearchSpace& space,
                         const SearchSettings& settings) {
    if (!train.has_labels()) throw DataError("run_search requires labels");

    // the group tags actually present in the table
    std::set<std::string> tags;
    for (const auto& name : train.feature_names()) tags.insert(group_of(name));
    bool has_volume = false;
    for (const auto& name : train.feature_names()) has_volume |= in_volume_subgroup(name);
    if (has_volume) tags.insert("volume");
    const std::vector<std::string> group_tags(tags.begin(), tags.end());

    const auto configs = sample_workflows(space, settings.budget, settings.master_seed, group_tags);
    const auto splits = make_inner_splits(train.labels(), settings.inner_folds,
                                          settings.inner_validation_fraction,
                                          settings.inner_split_seed);
    std::vector<ScoredWorkflow> scored(configs.size());
    parallel_for(configs.size(), settings.threads, [&](std::size_t i) {
        scored[i] = score_workflow(configs[i], train, splits);
    });
    return build_ensemble(scored, settings.ensemble_size, train, settings.threads);
}

} // namespace radml::search
