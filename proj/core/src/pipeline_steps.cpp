#include "radml/feature_dictionary.hpp"
#include "radml/pipeline.hpp"
#include "radml/stats13.hpp"
#include "radml/stats_tests.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace radml::pipeline {

Matrix table_matrix(const FeatureTable& table) {
    Matrix x(table.n_rows(), table.n_cols());
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        for (std::size_t c = 0; c < table.n_cols(); ++c) {
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = table.get(r, c);
        }
    }
    return x;
}

FittedScaler fit_robust_zscore(const Matrix& x) {
    if (x.rows() < 2) throw DataError("robust z-score needs at least 2 rows");
    FittedScaler s;
    s.center.resize(x.cols());
    s.scale.resize(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        std::vector<double> observed;
        observed.reserve(static_cast<std::size_t>(x.rows()));
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            if (!std::isnan(x(r, c))) observed.push_back(x(r, c));
        }
        if (observed.empty()) {
            s.center(c) = 0.0;
            s.scale(c) = 1.0;
            continue;
        }
        const double p5 = percentile(observed, 5.0);
        const double p95 = percentile(observed, 95.0);
        double sum = 0.0;
        std::size_t n = 0;
        for (double v : observed) {
            if (v >= p5 && v <= p95) {
                sum += v;
                ++n;
            }
        }
        const double mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
        double var = 0.0;
        for (double v : observed) {
            if (v >= p5 && v <= p95) var += (v - mean) * (v - mean);
        }
        var = n > 0 ? var / static_cast<double>(n) : 0.0;
        s.center(c) = mean;
        s.scale(c) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

Matrix apply_scaler(const FittedScaler& s, const Matrix& x) {
    if (x.cols() != s.center.size()) throw DataError("scaler column mismatch");
    Matrix out = x;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            if (!std::isnan(out(r, c))) out(r, c) = (out(r, c) - s.center(c)) / s.scale(c);
        }
    }
    return out;
}

FittedImputer fit_imputer(const Matrix& x, ImputerKind kind, int k) {
    FittedImputer imp;
    imp.kind = kind;
    imp.k = k;
    imp.fill.resize(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        std::vector<double> observed;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            if (!std::isnan(x(r, c))) observed.push_back(x(r, c));
        }
        if (observed.empty()) {
            imp.fill(c) = 0.0; // a feature with no observed training value imputes 0
            continue;
        }
        switch (kind) {
            case ImputerKind::Mean:
            case ImputerKind::Knn: { // knn falls back to the mean when no donor exists
                double s = 0;
                for (double v : observed) s += v;
                imp.fill(c) = s / static_cast<double>(observed.size());
                break;
            }
            case ImputerKind::Median: {
                std::sort(observed.begin(), observed.end());
                const std::size_t n = observed.size();
                imp.fill(c) = n % 2 == 1 ? observed[n / 2]
                                         : 0.5 * (observed[n / 2 - 1] + observed[n / 2]);
                break;
            }
            case ImputerKind::MostFrequent: {
                std::map<double, std::size_t> counts;
                for (double v : observed) ++counts[v];
                std::size_t best = 0;
                double value = observed[0];
                for (const auto& [v, count] : counts) {
                    if (count > best) {
                        best = count;
                        value = v;
                    }
                }
                imp.fill(c) = value;
                break;
            }
        }
    }
    if (kind == ImputerKind::Knn) imp.donors = x;
    return imp;
}

namespace {

/// Distance over co-observed features, scaled the nan-euclidean way.
double nan_distance(const Matrix& a, Eigen::Index ra, const Matrix& b, Eigen::Index rb) {
    double sum = 0.0;
    Eigen::Index present = 0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double va = a(ra, c), vb = b(rb, c);
        if (std::isnan(va) || std::isnan(vb)) continue;
        sum += (va - vb) * (va - vb);
        ++present;
    }
    if (present == 0) return std::numeric_limits<double>::infinity();
    return std::sqrt(sum * static_cast<double>(a.cols()) / static_cast<double>(present));
}

} // namespace

Matrix apply_imputer(const FittedImputer& imp, const Matrix& x) {
    if (x.cols() != imp.fill.size()) throw DataError("imputer column mismatch");
    Matrix out = x;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        std::vector<Eigen::Index> missing;
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            if (std::isnan(out(r, c))) missing.push_back(c);
        }
        if (missing.empty()) continue;

        if (imp.kind != ImputerKind::Knn) {
            for (Eigen::Index c : missing) out(r, c) = imp.fill(c);
            continue;
        }

        // rank donors once per row
        std::vector<std::pair<double, Eigen::Index>> order;
        for (Eigen::Index d = 0; d < imp.donors.rows(); ++d) {
            const double dist = nan_distance(x, r, imp.donors, d);
            if (std::isfinite(dist)) order.push_back({dist, d});
        }
        std::sort(order.begin(), order.end());
        for (Eigen::Index c : missing) {
            double sum = 0;
            int used = 0;
            for (const auto& [dist, d] : order) {
                if (std::isnan(imp.donors(d, c))) continue;
                sum += imp.donors(d, c);
                if (++used == imp.k) break;
            }
            out(r, c) = used > 0 ? sum / used : imp.fill(c);
        }
    }
    return out;
}

std::vector<int> variance_threshold(const Matrix& x) {
    std::vector<int> keep;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        double mean = 0;
        Eigen::Index n = 0;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            if (!std::isnan(x(r, c))) {
                mean += x(r, c);
                ++n;
            }
        }
        if (n == 0) continue;
        mean /= static_cast<double>(n);
        double var = 0;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            if (!std::isnan(x(r, c))) var += (x(r, c) - mean) * (x(r, c) - mean);
        }
        var /= static_cast<double>(n);
        if (var >= 0.01) keep.push_back(static_cast<int>(c));
    }
    if (keep.empty()) throw DegenerateWorkflow("variance threshold removed every feature");
    return keep;
}

std::vector<int> groupwise_select(const std::vector<std::string>& feature_names,
                                  const std::map<std::string, bool>& flags) {
    for (const auto& name : feature_names) {
        const std::string& group = group_of(name);
        if (!flags.count(group)) throw DataError("group flags missing tag: " + group);
    }
    std::vector<int> keep;
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        const std::string& group = group_of(feature_names[i]);
        bool on = flags.at(group);
        if (!on && in_volume_subgroup(feature_names[i])) {
            auto it = flags.find("volume");
            on = it != flags.end() && it->second;
        }
        if (on) keep.push_back(static_cast<int>(i));
    }
    if (keep.empty()) throw DegenerateWorkflow("all feature groups switched off");
    return keep;
}

std::vector<int> univariate_select(const Matrix& x, const std::vector<int>& y, double p_threshold) {
    std::vector<int> keep;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        std::vector<double> pos, neg;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            if (std::isnan(x(r, c))) continue;
            (y[static_cast<std::size_t>(r)] == 1 ? pos : neg).push_back(x(r, c));
        }
        if (pos.empty() || neg.empty()) continue;
        const auto result = stats::mann_whitney_u(pos, neg);
        if (result.p < p_threshold) keep.push_back(static_cast<int>(c));
    }
    if (keep.empty()) throw DegenerateWorkflow("univariate selection removed every feature");
    return keep;
}

FittedPca fit_pca(const Matrix& x, PcaMode mode, int fixed_k) {
    if (x.rows() < 2) throw DataError("pca needs at least 2 rows");
    FittedPca p;
    p.mean = x.colwise().mean();
    Matrix centered = x.rowwise() - p.mean.transpose();
    Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    rank = std::max(rank, 1);

    int k = rank;
    if (mode == PcaMode::Variance95) {
        double total = 0;
        for (Eigen::Index i = 0; i < rank; ++i) total += sv(i) * sv(i);
        double cum = 0;
        k = rank;
        for (int i = 0; i < rank; ++i) {
            cum += sv(i) * sv(i);
            if (cum >= 0.95 * total) {
                k = i + 1;
                break;
            }
        }
    } else if (mode == PcaMode::FixedK) {
        k = std::min(fixed_k, rank);
    }

    p.basis = svd.matrixV().leftCols(k);
    // deterministic sign: make the largest-magnitude entry of each basis
    // vector positive
    for (Eigen::Index c = 0; c < p.basis.cols(); ++c) {
        Eigen::Index arg = 0;
        p.basis.col(c).cwiseAbs().maxCoeff(&arg);
        if (p.basis(arg, c) < 0) p.basis.col(c) = -p.basis.col(c);
    }
    return p;
}

Matrix apply_pca(const FittedPca& p, const Matrix& x) {
    if (x.cols() != p.mean.size()) throw DataError("pca column mismatch");
    return (x.rowwise() - p.mean.transpose()) * p.basis;
}

// ---------------------------------------------------------------------------

FittedPipeline fit_pipeline(const WorkflowConfig& config, const FeatureTable& train) {
    if (!train.has_labels()) throw DataError("fit_pipeline requires labels");
    const auto& y = train.labels();
    bool has_pos = false, has_neg = false;
    for (int label : y) (label == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw DegenerateWorkflow("training split lost a class");

    FittedPipeline p;
    p.input_features = train.feature_names();

    Matrix x = table_matrix(train);
    if (config.scaler_on) {
        p.scaler = fit_robust_zscore(x);
        x = apply_scaler(*p.scaler, x);
    }
    p.imputer = fit_imputer(x, config.imputer, config.knn_k);
    x = apply_imputer(p.imputer, x);

    // selection: variance sanity check, then groups, then univariate
    std::vector<int> selected = variance_threshold(x);
    {
        std::vector<std::string> names;
        names.reserve(selected.size());
        for (int c : selected) names.push_back(train.feature_names()[static_cast<std::size_t>(c)]);
        const auto by_group = groupwise_select(names, config.group_flags);
        std::vector<int> next;
        next.reserve(by_group.size());
        for (int i : by_group) next.push_back(selected[static_cast<std::size_t>(i)]);
        selected = std::move(next);
    }
    Matrix xs(x.rows(), static_cast<Eigen::Index>(selected.size()));
    for (std::size_t i = 0; i < selected.size(); ++i) xs.col(static_cast<Eigen::Index>(i)) = x.col(selected[i]);
    if (config.univariate_on) {
        const auto by_p = univariate_select(xs, y, config.univariate_p);
        std::vector<int> next;
        Matrix filtered(x.rows(), static_cast<Eigen::Index>(by_p.size()));
        for (std::size_t i = 0; i < by_p.size(); ++i) {
            next.push_back(selected[static_cast<std::size_t>(by_p[i])]);
            filtered.col(static_cast<Eigen::Index>(i)) = xs.col(by_p[i]);
        }
        selected = std::move(next);
        xs = std::move(filtered);
    }
    p.selected = selected;

    if (config.pca_mode != PcaMode::Off) {
        p.pca = fit_pca(xs, config.pca_mode, config.pca_k);
        xs = apply_pca(*p.pca, xs);
    }

    Rng rng(config.rng_stream);
    ResampleResult rs = resample(xs, y, config.resampler, config.near_miss_version, rng);
    p.notes = rs.notes;

    has_pos = has_neg = false;
    for (int label : rs.y) (label == 1 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw DegenerateWorkflow("resampling removed a class");

    p.classifier = train_classifier(config, rs.x, rs.y);
    return p;
}

Vector pipeline_predict(const FittedPipeline& p, const FeatureTable& rows) {
    if (rows.feature_names() != p.input_features) {
        throw DataError("feature-name contract mismatch between model and table");
    }
    Matrix x = table_matrix(rows);
    if (p.scaler) x = apply_scaler(*p.scaler, x);
    x = apply_imputer(p.imputer, x);
    Matrix xs(x.rows(), static_cast<Eigen::Index>(p.selected.size()));
    for (std::size_t i = 0; i < p.selected.size(); ++i) {
        xs.col(static_cast<Eigen::Index>(i)) = x.col(p.selected[i]);
    }
    if (p.pca) xs = apply_pca(*p.pca, xs);
    return predict_proba(p.classifier, xs);
}

namespace {

void hash_doubles(std::uint64_t& h, const double* data, std::size_t n) {
    h = fnv1a64(data, n * sizeof(double), h);
}

void hash_matrix(std::uint64_t& h, const Matrix& m) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        hash_doubles(h, m.col(c).data(), static_cast<std::size_t>(m.rows()));
    }
}

} // namespace

std::uint64_t pipeline_param_hash(const FittedPipeline& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& name : p.input_features) h = fnv1a64(name, h);
    if (p.scaler) {
        hash_doubles(h, p.scaler->center.data(), static_cast<std::size_t>(p.scaler->center.size()));
        hash_doubles(h, p.scaler->scale.data(), static_cast<std::size_t>(p.scaler->scale.size()));
    }
    hash_doubles(h, p.imputer.fill.data(), static_cast<std::size_t>(p.imputer.fill.size()));
    hash_matrix(h, p.imputer.donors);
    h = fnv1a64(p.selected.data(), p.selected.size() * sizeof(int), h);
    if (p.pca) {
        hash_doubles(h, p.pca->mean.data(), static_cast<std::size_t>(p.pca->mean.size()));
        hash_matrix(h, p.pca->basis);
    }
    std::visit(
        [&](const auto& model) {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, LogisticModel>) {
                hash_doubles(h, model.weights.data(), static_cast<std::size_t>(model.weights.size()));
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                hash_matrix(h, model.support);
                hash_doubles(h, model.alpha_y.data(), static_cast<std::size_t>(model.alpha_y.size()));
                hash_doubles(h, &model.bias, 1);
                hash_doubles(h, &model.platt_a, 1);
                hash_doubles(h, &model.platt_b, 1);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                for (const auto& tree : model.trees) {
                    for (const auto& node : tree) {
                        h = fnv1a64(&node.feature, sizeof(node.feature), h);
                        hash_doubles(h, &node.threshold, 1);
                        hash_doubles(h, &node.leaf_positive_fraction, 1);
                    }
                }
            } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                hash_doubles(h, &model.prior_positive, 1);
                hash_doubles(h, model.mean0.data(), static_cast<std::size_t>(model.mean0.size()));
                hash_doubles(h, model.mean1.data(), static_cast<std::size_t>(model.mean1.size()));
                hash_doubles(h, model.var0.data(), static_cast<std::size_t>(model.var0.size()));
                hash_doubles(h, model.var1.data(), static_cast<std::size_t>(model.var1.size()));
            } else if constexpr (std::is_same_v<T, DiscriminantModel>) {
                hash_doubles(h, &model.prior_positive, 1);
                hash_doubles(h, model.mean0.data(), static_cast<std::size_t>(model.mean0.size()));
                hash_doubles(h, model.mean1.data(), static_cast<std::size_t>(model.mean1.size()));
                hash_matrix(h, model.cov_inv0);
                hash_matrix(h, model.cov_inv1);
            }
        },
        p.classifier);
    return h;
}

} // namespace radml::pipeline
