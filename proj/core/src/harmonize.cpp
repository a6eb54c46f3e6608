#include "radml/harmonize.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace radml::harmonize {

using pipeline::Matrix;
using pipeline::Vector;

int BatchModel::batch_index(const std::string& label) const {
    for (std::size_t i = 0; i < batch_labels.size(); ++i) {
        if (batch_labels[i] == label) return static_cast<int>(i);
    }
    return -1;
}

namespace {

struct BatchStats {
    double mean = 0, var = 0;
    std::size_t n = 0;
};

BatchStats column_stats(const Matrix& x, const std::vector<int>& rows, Eigen::Index c) {
    BatchStats s;
    for (int r : rows) {
        const double v = x(r, c);
        if (std::isnan(v)) continue;
        s.mean += v;
        ++s.n;
    }
    if (s.n == 0) return s;
    s.mean /= static_cast<double>(s.n);
    for (int r : rows) {
        const double v = x(r, c);
        if (std::isnan(v)) continue;
        s.var += (v - s.mean) * (v - s.mean);
    }
    s.var /= static_cast<double>(s.n); // population variance: a single batch harmonizes to itself
    return s;
}

} // namespace

BatchModel combat_fit(const Matrix& x, const std::vector<std::string>& batches,
                      bool allow_single_batch) {
    if (static_cast<std::size_t>(x.rows()) != batches.size()) {
        throw DataError("combat_fit rows/batches mismatch");
    }
    std::map<std::string, std::vector<int>> groups;
    for (std::size_t i = 0; i < batches.size(); ++i) {
        groups[batches[i]].push_back(static_cast<int>(i));
    }
    if (groups.size() < 2 && !allow_single_batch) {
        throw DataError("combat requires at least 2 batches");
    }
    for (const auto& [label, rows] : groups) {
        if (rows.size() < 2) throw DataError("combat batch '" + label + "' has fewer than 2 samples");
    }

    BatchModel model;
    for (const auto& [label, rows] : groups) {
        (void)rows;
        model.batch_labels.push_back(label);
    }
    const auto n_batches = static_cast<Eigen::Index>(model.batch_labels.size());
    const Eigen::Index p = x.cols();
    const double n_total = static_cast<double>(x.rows());

    model.grand_mean.resize(p);
    model.pooled_std.resize(p);
    model.gamma_star.resize(n_batches, p);
    model.delta_star.resize(n_batches, p);
    model.recenter = Vector::Zero(p);

    Matrix gamma_hat(n_batches, p), delta_hat2(n_batches, p);
    std::vector<std::vector<int>> batch_rows;
    for (const auto& label : model.batch_labels) batch_rows.push_back(groups.at(label));

    for (Eigen::Index c = 0; c < p; ++c) {
        // grand mean as the size-weighted batch-mean average, pooled
        // within-batch variance
        double grand = 0, pooled_var = 0, observed = 0;
        std::vector<BatchStats> stats;
        for (const auto& rows : batch_rows) stats.push_back(column_stats(x, rows, c));
        for (std::size_t b = 0; b < stats.size(); ++b) {
            grand += stats[b].mean * static_cast<double>(stats[b].n);
            pooled_var += stats[b].var * static_cast<double>(stats[b].n);
            observed += static_cast<double>(stats[b].n);
        }
        if (observed == 0) {
            model.grand_mean(c) = 0;
            model.pooled_std(c) = 1;
            gamma_hat.col(c).setZero();
            delta_hat2.col(c).setOnes();
            continue;
        }
        grand /= observed;
        pooled_var /= observed;
        model.grand_mean(c) = grand;
        model.pooled_std(c) = pooled_var > 0 ? std::sqrt(pooled_var) : 1.0;

        for (Eigen::Index b = 0; b < n_batches; ++b) {
            const auto& s = stats[static_cast<std::size_t>(b)];
            gamma_hat(b, c) = (s.mean - grand) / model.pooled_std(c);
            const double dv = s.var / (model.pooled_std(c) * model.pooled_std(c));
            delta_hat2(b, c) = dv > 0 ? dv : 1.0;
        }
    }
    (void)n_total;

    // empirical-Bayes shrinkage per batch across features
    for (Eigen::Index b = 0; b < n_batches; ++b) {
        const double nb = static_cast<double>(batch_rows[static_cast<std::size_t>(b)].size());
        // prior moments over features
        double gamma_bar = gamma_hat.row(b).mean();
        double tau2 = 0;
        for (Eigen::Index c = 0; c < p; ++c) {
            tau2 += (gamma_hat(b, c) - gamma_bar) * (gamma_hat(b, c) - gamma_bar);
        }
        tau2 = p > 1 ? tau2 / static_cast<double>(p - 1) : 0.0;
        double d_mean = delta_hat2.row(b).mean();
        double d_var = 0;
        for (Eigen::Index c = 0; c < p; ++c) {
            d_var += (delta_hat2(b, c) - d_mean) * (delta_hat2(b, c) - d_mean);
        }
        d_var = p > 1 ? d_var / static_cast<double>(p - 1) : 0.0;

        if (tau2 <= 0 || d_var <= 0) {
            // degenerate priors (single feature or identical estimates):
            // no shrinkage
            model.gamma_star.row(b) = gamma_hat.row(b);
            model.delta_star.row(b) = delta_hat2.row(b).cwiseSqrt();
            continue;
        }
        const double lambda_prior = (2.0 * d_var + d_mean * d_mean) / d_var;
        const double theta_prior = (d_mean * d_var + d_mean * d_mean * d_mean) / d_var;

        for (Eigen::Index c = 0; c < p; ++c) {
            // fixed-point iteration of the posterior location/scale
            double gamma = gamma_hat(b, c);
            double delta2 = delta_hat2(b, c);
            // sum of squares around gamma over the batch (observed cells)
            const auto& rows = batch_rows[static_cast<std::size_t>(b)];
            std::vector<double> z;
            z.reserve(rows.size());
            for (int r : rows) {
                const double v = x(r, c);
                if (std::isnan(v)) continue;
                z.push_back((v - model.grand_mean(c)) / model.pooled_std(c));
            }
            const double nb_observed = static_cast<double>(z.size());
            if (nb_observed < 2) {
                model.gamma_star(b, c) = gamma;
                model.delta_star(b, c) = std::sqrt(delta2);
                continue;
            }
            for (int iter = 0; iter < 100; ++iter) {
                const double gamma_next =
                    (nb * tau2 * gamma_hat(b, c) + delta2 * gamma_bar) / (nb * tau2 + delta2);
                double ss = 0;
                for (double v : z) ss += (v - gamma_next) * (v - gamma_next);
                const double delta2_next =
                    (theta_prior + 0.5 * ss) / (nb_observed / 2.0 + lambda_prior - 1.0);
                const double change =
                    std::abs(gamma_next - gamma) + std::abs(delta2_next - delta2);
                gamma = gamma_next;
                delta2 = std::max(delta2_next, 1e-12);
                if (change < 1e-10) break;
            }
            model.gamma_star(b, c) = gamma;
            model.delta_star(b, c) = std::sqrt(delta2);
        }
    }

    // recentring so the pooled grand mean is preserved exactly on fit data
    std::vector<int> batch_of(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index b = 0; b < n_batches; ++b) {
        for (int r : batch_rows[static_cast<std::size_t>(b)]) batch_of[static_cast<std::size_t>(r)] = static_cast<int>(b);
    }
    for (Eigen::Index c = 0; c < p; ++c) {
        double sum = 0;
        std::size_t n = 0;
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            const double v = x(r, c);
            if (std::isnan(v)) continue;
            const int b = batch_of[static_cast<std::size_t>(r)];
            const double z = (v - model.grand_mean(c)) / model.pooled_std(c);
            sum += model.pooled_std(c) * (z - model.gamma_star(b, c)) / model.delta_star(b, c) +
                   model.grand_mean(c);
            ++n;
        }
        if (n > 0) model.recenter(c) = model.grand_mean(c) - sum / static_cast<double>(n);
    }
    return model;
}

Matrix combat_apply(const BatchModel& model, const Matrix& x,
                    const std::vector<std::string>& batches) {
    if (static_cast<std::size_t>(x.rows()) != batches.size()) {
        throw DataError("combat_apply rows/batches mismatch");
    }
    if (x.cols() != model.grand_mean.size()) throw DataError("combat_apply column mismatch");
    std::vector<int> batch_of(batches.size());
    for (std::size_t i = 0; i < batches.size(); ++i) {
        const int b = model.batch_index(batches[i]);
        if (b < 0) throw DataError("combat_apply: unseen batch '" + batches[i] + "'");
        batch_of[i] = b;
    }
    Matrix out = x;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const int b = batch_of[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            const double v = x(r, c);
            if (std::isnan(v)) continue;
            const double z = (v - model.grand_mean(c)) / model.pooled_std(c);
            out(r, c) = model.pooled_std(c) * (z - model.gamma_star(b, c)) / model.delta_star(b, c) +
                        model.grand_mean(c) + model.recenter(c);
        }
    }
    return out;
}

double icc(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw DataError("icc requires >= 2 paired subjects");
    const double n = static_cast<double>(a.size());
    constexpr double k = 2.0;

    double grand = 0;
    for (std::size_t i = 0; i < a.size(); ++i) grand += a[i] + b[i];
    grand /= (n * k);
    const double mean_a = [&] {
        double s = 0;
        for (double v : a) s += v;
        return s / n;
    }();
    const double mean_b = [&] {
        double s = 0;
        for (double v : b) s += v;
        return s / n;
    }();

    double ss_rows = 0, ss_cols = 0, ss_err = 0;
    ss_cols = n * ((mean_a - grand) * (mean_a - grand) + (mean_b - grand) * (mean_b - grand));
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double row_mean = 0.5 * (a[i] + b[i]);
        ss_rows += k * (row_mean - grand) * (row_mean - grand);
        ss_err += (a[i] - row_mean - mean_a + grand) * (a[i] - row_mean - mean_a + grand);
        ss_err += (b[i] - row_mean - mean_b + grand) * (b[i] - row_mean - mean_b + grand);
    }
    const double ms_rows = ss_rows / (n - 1.0);
    const double ms_cols = ss_cols / (k - 1.0);
    const double ms_err = ss_err / ((n - 1.0) * (k - 1.0));

    const double denominator = ms_rows + (k - 1.0) * ms_err + k / n * (ms_cols - ms_err);
    if (denominator == 0.0) return 1.0; // all values identical
    return (ms_rows - ms_err) / denominator;
}

std::vector<std::string> icc_filter(const FeatureTable& observer_a, const FeatureTable& observer_b,
                                    double threshold) {
    if (observer_a.feature_names() != observer_b.feature_names()) {
        throw DataError("icc_filter tables must share feature names");
    }
    if (observer_a.patient_ids() != observer_b.patient_ids()) {
        throw DataError("icc_filter tables must share patient ids (same order)");
    }
    std::vector<std::string> selected;
    for (std::size_t c = 0; c < observer_a.n_cols(); ++c) {
        std::vector<double> a, b;
        for (std::size_t r = 0; r < observer_a.n_rows(); ++r) {
            const double va = observer_a.get(r, c), vb = observer_b.get(r, c);
            if (is_missing(va) || is_missing(vb)) continue;
            a.push_back(va);
            b.push_back(vb);
        }
        if (a.size() < 2) continue;
        if (icc(a, b) > threshold) selected.push_back(observer_a.feature_names()[c]);
    }
    return selected;
}

double dice(const RoiMask& a, const RoiMask& b) {
    if (a.dims != b.dims) throw DataError("dice masks must share dimensions");
    std::size_t na = 0, nb = 0, inter = 0;
    for (std::size_t i = 0; i < a.voxels.size(); ++i) {
        na += a.voxels[i] != 0;
        nb += b.voxels[i] != 0;
        inter += (a.voxels[i] && b.voxels[i]);
    }
    if (na + nb == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(na + nb);
}

} // namespace radml::harmonize
