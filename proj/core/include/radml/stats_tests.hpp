#pragma once

#include <cstddef>
#include <vector>

namespace radml::stats {

/// Mann-Whitney U of sample x versus y (ties count half) with a two-sided
/// p-value: exact by enumeration when n + m <= 12, otherwise the normal
/// approximation with tie-adjusted variance and continuity correction.
struct MannWhitneyResult {
    double u = 0;
    double p = 1;
    bool exact = false;
};
MannWhitneyResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

/// Pearson chi-square p-value of an r x c contingency table (counts >= 0).
/// Yates continuity correction for 2x2 tables; empty rows/columns dropped.
double chi_square(const std::vector<std::vector<double>>& contingency);

/// min(1, m * p) per entry, m = number of tests.
std::vector<double> bonferroni(const std::vector<double>& p_values);

/// Cohen's kappa of paired categorical ratings; chance agreement of 1
/// (both raters constant and equal) is defined as kappa = 1.
double cohens_kappa(const std::vector<int>& a, const std::vector<int>& b);

/// Area under the ROC curve as the concordant-pair fraction with ties
/// counted one half. Requires both classes present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

/// DeLong test for two paired score vectors on identical patients.
struct DelongResult {
    double auc_a = 0;
    double auc_b = 0;
    double p = 1;
    bool degenerate = false; // variance collapsed with unequal AUCs
};
DelongResult delong_test(const std::vector<double>& scores_a, const std::vector<double>& scores_b,
                         const std::vector<int>& labels);

/// Corrected resampled t-interval: mean +/- t_{k-1,(1+level)/2} *
/// sqrt((1/k + n_test/n_train) * s^2). Bounds are not clipped to [0, 1].
struct Interval {
    double lower = 0;
    double mean = 0;
    double upper = 0;
};
Interval corrected_resampled_ci(const std::vector<double>& values, double n_train, double n_test,
                                double level = 0.95);

/// Standard normal CDF.
double normal_cdf(double z);

} // namespace radml::stats
