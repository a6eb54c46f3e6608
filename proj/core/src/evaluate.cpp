#include "radml/evaluate.hpp"

#include "radml/feature_dictionary.hpp"
#include "radml/harmonize.hpp"
#include "radml/threading.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace radml::eval {

SplitPlan make_split_plan(const std::vector<int>& labels, int n_iter, double test_fraction,
                          std::uint64_t seed, SplitMode mode) {
    SplitPlan plan;
    plan.mode = mode;
    plan.test_fraction = test_fraction;

    if (mode == SplitMode::LeaveOneOut) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            std::vector<std::size_t> train;
            for (std::size_t j = 0; j < labels.size(); ++j) {
                if (j != i) train.push_back(j);
            }
            plan.iterations.push_back({std::move(train), {i}});
        }
        return plan;
    }

    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? positives : negatives).push_back(i);
    }
    if (positives.size() < 2 || negatives.size() < 2) {
        throw DataError("random-split plans need at least 2 patients per class");
    }
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw DataError("test fraction must lie in (0, 1)");
    }

    // per-class test counts: floor of the share, leftovers to the largest
    // fractional remainders, total pinned to round(fraction * N)
    const double total_share = test_fraction * static_cast<double>(labels.size());
    auto target_total = static_cast<std::size_t>(std::llround(total_share));
    target_total = std::min(target_total, labels.size() - 2);
    target_total = std::max<std::size_t>(target_total, 2);

    struct ClassShare {
        const std::vector<std::size_t>* members;
        std::size_t take;
        double remainder;
    };
    std::vector<ClassShare> shares;
    std::size_t assigned = 0;
    for (const auto* cls : {&positives, &negatives}) {
        const double share = test_fraction * static_cast<double>(cls->size());
        const auto floor_take = static_cast<std::size_t>(std::floor(share));
        shares.push_back({cls, floor_take, share - std::floor(share)});
        assigned += floor_take;
    }
    // positives first on remainder ties
    std::stable_sort(shares.begin(), shares.end(),
                     [](const ClassShare& a, const ClassShare& b) { return a.remainder > b.remainder; });
    for (std::size_t i = 0; assigned < target_total && i < shares.size(); ++i) {
        if (shares[i].take < shares[i].members->size() - 1) {
            ++shares[i].take;
            ++assigned;
        }
    }

    for (int iter = 0; iter < n_iter; ++iter) {
        Rng rng = Rng::derive(seed, "outer-split", {static_cast<std::uint64_t>(iter)});
        std::vector<std::size_t> train, test;
        for (const auto& share : shares) {
            std::vector<std::size_t> shuffled = *share.members;
            rng.shuffle(shuffled);
            for (std::size_t i = 0; i < shuffled.size(); ++i) {
                (i < share.take ? test : train).push_back(shuffled[i]);
            }
        }
        std::sort(train.begin(), train.end());
        std::sort(test.begin(), test.end());
        plan.iterations.push_back({std::move(train), std::move(test)});
    }
    return plan;
}

double bca(double sensitivity, double specificity) { return 0.5 * (sensitivity + specificity); }

ConfusionMetrics confusion_metrics(const std::vector<double>& scores,
                                   const std::vector<int>& labels, double threshold) {
    if (scores.size() != labels.size()) throw DataError("confusion_metrics length mismatch");
    double tp = 0, tn = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (labels[i] == 1) (predicted ? tp : fn) += 1;
        else (predicted ? fp : tn) += 1;
    }
    ConfusionMetrics m;
    m.sensitivity = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.specificity = tn + fp > 0 ? tn / (tn + fp) : 0.0;
    m.bca = bca(m.sensitivity, m.specificity);
    return m;
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DataError("roc_curve length mismatch");
    double n_pos = 0, n_neg = 0;
    for (int l : labels) (l == 1 ? n_pos : n_neg) += 1;
    if (n_pos == 0 || n_neg == 0) throw DataError("roc_curve requires both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });

    RocCurve curve;
    curve.fpr.push_back(0);
    curve.tpr.push_back(0);
    double tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            (labels[order[i]] == 1 ? tp : fp) += 1;
            ++i;
        }
        curve.fpr.push_back(fp / n_neg);
        curve.tpr.push_back(tp / n_pos);
    }
    return curve;
}

namespace {

/// Staircase interpolation: the highest TPR attained at FPR <= f.
double interp_roc(const RocCurve& curve, double f) {
    double best = 0;
    for (std::size_t i = 0; i < curve.fpr.size(); ++i) {
        if (curve.fpr[i] <= f + 1e-12) best = std::max(best, curve.tpr[i]);
    }
    return best;
}

} // namespace

RocBand roc_band(const std::vector<RocCurve>& curves, double level) {
    if (curves.size() < 2) throw DataError("roc_band requires >= 2 curves");
    RocBand band;
    constexpr int kGrid = 101;
    band.fpr_grid.resize(kGrid);
    band.mean_tpr.assign(kGrid, 0.0);
    std::vector<std::vector<double>> resampled(curves.size(), std::vector<double>(kGrid));
    for (int g = 0; g < kGrid; ++g) {
        band.fpr_grid[static_cast<std::size_t>(g)] = static_cast<double>(g) / (kGrid - 1);
    }
    for (std::size_t c = 0; c < curves.size(); ++c) {
        for (int g = 0; g < kGrid; ++g) {
            resampled[c][static_cast<std::size_t>(g)] =
                interp_roc(curves[c], band.fpr_grid[static_cast<std::size_t>(g)]);
            band.mean_tpr[static_cast<std::size_t>(g)] += resampled[c][static_cast<std::size_t>(g)];
        }
    }
    for (auto& v : band.mean_tpr) v /= static_cast<double>(curves.size());

    // per-curve maximal deviation from the mean curve
    std::vector<double> deviations;
    deviations.reserve(curves.size());
    for (const auto& r : resampled) {
        double d = 0;
        for (int g = 0; g < kGrid; ++g) {
            d = std::max(d, std::abs(r[static_cast<std::size_t>(g)] -
                                     band.mean_tpr[static_cast<std::size_t>(g)]));
        }
        deviations.push_back(d);
    }
    std::sort(deviations.begin(), deviations.end());
    const auto needed = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(curves.size())));
    band.half_width = deviations[std::min(deviations.size() - 1, std::max<std::size_t>(needed, 1) - 1)];
    return band;
}

Typicality rank_typicality(const std::vector<PatientStat>& stats) {
    Typicality t;
    double best_gap = 2.0;
    for (const auto& s : stats) {
        if (s.tested == 0) {
            t.never_tested.push_back(s.id);
            continue;
        }
        const double fraction = static_cast<double>(s.correct) / static_cast<double>(s.tested);
        if (s.correct == s.tested) t.typical.push_back(s.id);
        else if (s.correct == 0) t.atypical.push_back(s.id);
        best_gap = std::min(best_gap, std::abs(fraction - 0.5));
    }
    for (const auto& s : stats) {
        if (s.tested == 0) continue;
        const double fraction = static_cast<double>(s.correct) / static_cast<double>(s.tested);
        if (std::abs(std::abs(fraction - 0.5) - best_gap) < 1e-12) {
            t.ambiguous.push_back({s.id, fraction});
        }
    }
    return t;
}

EvaluationReport run_experiment(const FeatureTable& table, const std::vector<std::string>& batches,
                                const SplitPlan& plan, const pipeline::SearchSpace& space,
                                const ExperimentSettings& settings) {
    if (!table.has_labels()) throw DataError("run_experiment requires labels");
    if (plan.iterations.empty()) throw DataError("empty split plan");
    const bool use_combat = settings.combat_group.has_value();
    if (use_combat && batches.size() != table.n_rows()) {
        throw DataError("combat requested but batch labels are incomplete");
    }

    EvaluationReport report;
    report.seed = settings.seed;
    report.budget = settings.budget;
    report.ensemble_size = settings.ensemble_size;
    report.inner_folds = settings.inner_folds;
    report.inner_validation_fraction = settings.inner_validation_fraction;
    report.n_iterations = static_cast<int>(plan.iterations.size());
    report.test_fraction = plan.test_fraction;
    report.split_mode = plan.mode == SplitMode::LeaveOneOut ? "leave-one-out" : "random-split";
    report.combat_group = use_combat ? *settings.combat_group : "";
    report.feature_names = table.feature_names();
    report.threads = settings.threads;

    // imaging columns are the ones ComBat harmonizes
    std::vector<std::size_t> imaging_columns;
    if (use_combat) {
        const auto& names = table.feature_names();
        const std::set<std::string> imaging_tags(imaging_group_tags().begin(),
                                                 imaging_group_tags().end());
        for (std::size_t c = 0; c < names.size(); ++c) {
            if (imaging_tags.count(group_of(names[c]))) imaging_columns.push_back(c);
        }
        if (imaging_columns.empty()) throw DataError("combat requested but no imaging columns present");
    }

    std::map<std::string, PatientStat> per_patient;
    for (const auto& id : table.patient_ids()) per_patient[id] = {id, 0, 0};

    std::vector<RocCurve> curves;
    std::vector<double> aucs, bcas, sensitivities, specificities;

    for (std::size_t iter = 0; iter < plan.iterations.size(); ++iter) {
        try {
            const auto& [train_rows, test_rows] = plan.iterations[iter];
            FeatureTable train = table.select_rows(train_rows);
            FeatureTable test = table.select_rows(test_rows);

            if (use_combat) {
                std::vector<std::string> train_batches, test_batches;
                for (auto r : train_rows) train_batches.push_back(batches[r]);
                for (auto r : test_rows) test_batches.push_back(batches[r]);
                pipeline::Matrix train_imaging(static_cast<Eigen::Index>(train.n_rows()),
                                               static_cast<Eigen::Index>(imaging_columns.size()));
                pipeline::Matrix test_imaging(static_cast<Eigen::Index>(test.n_rows()),
                                              static_cast<Eigen::Index>(imaging_columns.size()));
                for (std::size_t r = 0; r < train.n_rows(); ++r) {
                    for (std::size_t i = 0; i < imaging_columns.size(); ++i) {
                        train_imaging(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
                            train.get(r, imaging_columns[i]);
                    }
                }
                for (std::size_t r = 0; r < test.n_rows(); ++r) {
                    for (std::size_t i = 0; i < imaging_columns.size(); ++i) {
                        test_imaging(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
                            test.get(r, imaging_columns[i]);
                    }
                }
                const auto model = harmonize::combat_fit(train_imaging, train_batches);
                const auto train_adjusted = harmonize::combat_apply(model, train_imaging, train_batches);
                const auto test_adjusted = harmonize::combat_apply(model, test_imaging, test_batches);
                for (std::size_t r = 0; r < train.n_rows(); ++r) {
                    for (std::size_t i = 0; i < imaging_columns.size(); ++i) {
                        train.set(r, imaging_columns[i],
                                  train_adjusted(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)));
                    }
                }
                for (std::size_t r = 0; r < test.n_rows(); ++r) {
                    for (std::size_t i = 0; i < imaging_columns.size(); ++i) {
                        test.set(r, imaging_columns[i],
                                 test_adjusted(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)));
                    }
                }
            }

            search::SearchSettings s;
            s.budget = settings.budget;
            s.ensemble_size = settings.ensemble_size;
            s.inner_folds = settings.inner_folds;
            s.inner_validation_fraction = settings.inner_validation_fraction;
            s.master_seed = settings.seed;
            s.inner_split_seed = Rng::derive(settings.seed, "inner-seed", {iter}).next_u64();
            s.threads = settings.threads;
            const auto ensemble = search::run_search(train, space, s);

            std::uint64_t fitted_hash = 0xcbf29ce484222325ULL;
            for (const auto& member : ensemble.members) {
                const std::uint64_t h = pipeline::pipeline_param_hash(member.fitted);
                fitted_hash = fnv1a64(&h, sizeof(h), fitted_hash);
            }
            report.fitted_hashes.push_back(fitted_hash);

            const auto probabilities = search::ensemble_predict(ensemble, test);
            std::vector<double> scores(probabilities.data(),
                                       probabilities.data() + probabilities.size());
            const auto& truth = test.labels();

            aucs.push_back(stats::auc(scores, truth));
            const auto cm = confusion_metrics(scores, truth);
            bcas.push_back(cm.bca);
            sensitivities.push_back(cm.sensitivity);
            specificities.push_back(cm.specificity);
            curves.push_back(roc_curve(scores, truth));
            report.iterations.push_back({aucs.back(), cm.bca, cm.sensitivity, cm.specificity});

            for (std::size_t i = 0; i < test_rows.size(); ++i) {
                auto& stat = per_patient[test.patient_ids()[i]];
                stat.tested += 1;
                stat.correct += ((scores[i] >= 0.5 ? 1 : 0) == truth[i]);
            }
        } catch (const std::exception& e) {
            throw DataError("iteration " + std::to_string(iter) + " failed: " + e.what());
        }
    }

    const double n_test = static_cast<double>(plan.iterations[0].second.size());
    const double n_train = static_cast<double>(plan.iterations[0].first.size());
    report.ci_auc = stats::corrected_resampled_ci(aucs, n_train, n_test);
    report.ci_bca = stats::corrected_resampled_ci(bcas, n_train, n_test);
    report.ci_sensitivity = stats::corrected_resampled_ci(sensitivities, n_train, n_test);
    report.ci_specificity = stats::corrected_resampled_ci(specificities, n_train, n_test);
    if (curves.size() >= 2) report.roc = roc_band(curves);

    for (const auto& id : table.patient_ids()) report.per_patient.push_back(per_patient[id]);
    report.typicality = rank_typicality(report.per_patient);
    return report;
}

} // namespace radml::eval
