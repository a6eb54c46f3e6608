#pragma once

#include "radml/pipeline.hpp"
#include "radml/types.hpp"

#include <string>
#include <vector>

namespace radml::harmonize {

/// Parametric empirical-Bayes batch harmonization (location/scale, no
/// moderation variables). Fit on training data, applied to any data with
/// known batches.
struct BatchModel {
    std::vector<std::string> batch_labels;  // order fixes the parameter rows
    pipeline::Vector grand_mean, pooled_std; // per feature
    pipeline::Matrix gamma_star, delta_star; // batches x features
    pipeline::Vector recenter;               // keeps the pooled grand mean exact

    int batch_index(const std::string& label) const;
};

/// Requires >= 2 batches with >= 2 samples each (single batch allowed only
/// when `allow_single_batch`, where the transform is the identity). Missing
/// cells are ignored when fitting and pass through untouched.
BatchModel combat_fit(const pipeline::Matrix& x, const std::vector<std::string>& batches,
                      bool allow_single_batch = false);
pipeline::Matrix combat_apply(const BatchModel& model, const pipeline::Matrix& x,
                              const std::vector<std::string>& batches);

/// Two-way mixed-effects, absolute-agreement, single-rater intra-class
/// correlation of two observers. All values identical is defined as 1;
/// negative values are possible.
double icc(const std::vector<double>& a, const std::vector<double>& b);

/// Features whose ICC across the two observers' tables strictly exceeds the
/// threshold. Tables must share feature names and patient ids.
std::vector<std::string> icc_filter(const FeatureTable& observer_a, const FeatureTable& observer_b,
                                    double threshold);

/// Dice overlap 2|A^B| / (|A| + |B|); two empty masks are defined as 1.
double dice(const RoiMask& a, const RoiMask& b);

} // namespace radml::harmonize
