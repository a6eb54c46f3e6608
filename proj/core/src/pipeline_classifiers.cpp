#include "radml/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace radml::pipeline {

namespace {

double sigmoid(double z) {
    if (z >= 0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_finite(const Matrix& x) {
    if (!x.allFinite()) throw DataError("classifier features must be finite");
}

// ---------------------------------------------------------- logistic -------

/// Full-batch Newton iteration on the L2-penalized logistic loss (penalty on
/// every coefficient, intercept included). Stops at 500 iterations or a
/// gradient max-norm of 1e-8. When d > n the Newton system is solved through
/// the n x n Woodbury form.
LogisticModel train_logistic(const Matrix& x, const std::vector<int>& y, double lambda) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols() + 1;
    Matrix xa(n, d);
    xa.leftCols(x.cols()) = x;
    xa.col(d - 1).setOnes();

    Vector t(n);
    for (Eigen::Index i = 0; i < n; ++i) t(i) = y[static_cast<std::size_t>(i)];

    Vector w = Vector::Zero(d);
    auto loss = [&](const Vector& wv) {
        const Vector f = xa * wv;
        double value = 0.5 * lambda * wv.squaredNorm();
        for (Eigen::Index i = 0; i < n; ++i) {
            // log(1 + exp(-s f)) with s = +/-1, stable form
            const double sf = (t(i) > 0.5 ? 1.0 : -1.0) * f(i);
            value += sf > 0 ? std::log1p(std::exp(-sf)) : -sf + std::log1p(std::exp(sf));
        }
        return value;
    };

    double current = loss(w);
    for (int iter = 0; iter < 500; ++iter) {
        const Vector f = xa * w;
        Vector p(n), wdiag(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            p(i) = sigmoid(f(i));
            wdiag(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
        }
        const Vector g = xa.transpose() * (p - t) + lambda * w;
        if (g.cwiseAbs().maxCoeff() < 1e-8) break;

        Vector step;
        if (d <= n) {
            Matrix h = xa.transpose() * wdiag.asDiagonal() * xa;
            h.diagonal().array() += lambda;
            step = h.ldlt().solve(-g);
        } else {
            // (lambda I + U^T U)^-1 g = (g - U^T (lambda I_n + U U^T)^-1 U g) / lambda
            const Matrix u = wdiag.cwiseSqrt().asDiagonal() * xa;
            Matrix inner = u * u.transpose();
            inner.diagonal().array() += lambda;
            const Vector ug = u * g;
            step = -(g - u.transpose() * inner.ldlt().solve(ug)) / lambda;
        }

        double scale = 1.0;
        Vector next = w + step;
        double next_loss = loss(next);
        int halvings = 0;
        while (next_loss > current && halvings < 40) {
            scale *= 0.5;
            next = w + scale * step;
            next_loss = loss(next);
            ++halvings;
        }
        if (next_loss > current) break;
        w = next;
        current = next_loss;
    }

    LogisticModel m;
    m.weights = w;
    return m;
}

Vector predict_logistic(const LogisticModel& m, const Matrix& x) {
    Vector out(x.rows());
    const Eigen::Index d = m.weights.size() - 1;
    if (x.cols() != d) throw DataError("logistic feature-count mismatch");
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        out(i) = sigmoid(x.row(i).dot(m.weights.head(d)) + m.weights(d));
    }
    return out;
}

// --------------------------------------------------------------- svm -------

double kernel_eval(const SvmModel& m, const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    if (m.kernel == SvmKernel::Linear) return a.dot(b);
    return std::exp(-m.gamma * (a - b).squaredNorm());
}

/// Sequential minimal optimization with deterministic pair selection.
SvmModel train_svm(const Matrix& x, const std::vector<int>& y, SvmKernel kernel, double c,
                   double gamma) {
    const Eigen::Index n = x.rows();
    SvmModel model;
    model.kernel = kernel;
    model.gamma = gamma;

    Vector sy(n);
    for (Eigen::Index i = 0; i < n; ++i) sy(i) = y[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;

    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            SvmModel probe = model;
            const double v = kernel_eval(probe, x.row(i), x.row(j));
            k(i, j) = v;
            k(j, i) = v;
        }
    }

    Vector alpha = Vector::Zero(n);
    double b = 0.0;
    auto decision = [&](Eigen::Index i) {
        double f = b;
        for (Eigen::Index j = 0; j < n; ++j) f += alpha(j) * sy(j) * k(j, i);
        return f;
    };

    constexpr double kTol = 1e-3;
    constexpr int kMaxEpochs = 200;
    for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
        int changed = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ei = decision(i) - sy(i);
            const bool violates = (sy(i) * ei < -kTol && alpha(i) < c) ||
                                  (sy(i) * ei > kTol && alpha(i) > 0);
            if (!violates) continue;

            // second multiplier: largest |Ei - Ej|, ties by index
            Eigen::Index j_best = -1;
            double best_gap = -1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                const double gap = std::abs(ei - (decision(j) - sy(j)));
                if (gap > best_gap + 1e-15) {
                    best_gap = gap;
                    j_best = j;
                }
            }
            if (j_best < 0) continue;
            const Eigen::Index j = j_best;
            const double ej = decision(j) - sy(j);

            const double ai_old = alpha(i), aj_old = alpha(j);
            double lo, hi;
            if (sy(i) != sy(j)) {
                lo = std::max(0.0, aj_old - ai_old);
                hi = std::min(c, c + aj_old - ai_old);
            } else {
                lo = std::max(0.0, ai_old + aj_old - c);
                hi = std::min(c, ai_old + aj_old);
            }
            if (hi - lo < 1e-12) continue;
            const double eta = 2.0 * k(i, j) - k(i, i) - k(j, j);
            if (eta >= -1e-12) continue;

            double aj = aj_old - sy(j) * (ei - ej) / eta;
            aj = std::clamp(aj, lo, hi);
            if (std::abs(aj - aj_old) < 1e-7) continue;
            const double ai = ai_old + sy(i) * sy(j) * (aj_old - aj);
            alpha(i) = ai;
            alpha(j) = aj;

            const double b1 = b - ei - sy(i) * (ai - ai_old) * k(i, i) -
                              sy(j) * (aj - aj_old) * k(i, j);
            const double b2 = b - ej - sy(i) * (ai - ai_old) * k(i, j) -
                              sy(j) * (aj - aj_old) * k(j, j);
            if (ai > 0 && ai < c) b = b1;
            else if (aj > 0 && aj < c) b = b2;
            else b = 0.5 * (b1 + b2);
            ++changed;
        }
        if (changed == 0) break;
    }

    std::vector<Eigen::Index> sv;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (alpha(i) > 1e-12) sv.push_back(i);
    }
    if (sv.empty()) sv.push_back(0); // degenerate but well-defined
    model.support.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    model.alpha_y.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t i = 0; i < sv.size(); ++i) {
        model.support.row(static_cast<Eigen::Index>(i)) = x.row(sv[i]);
        model.alpha_y(static_cast<Eigen::Index>(i)) = alpha(sv[i]) * sy(sv[i]);
    }
    model.bias = b;

    // Platt calibration of the margin on the training data
    Vector margins(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double f = model.bias;
        for (Eigen::Index s = 0; s < model.support.rows(); ++s) {
            f += model.alpha_y(s) * kernel_eval(model, model.support.row(s), x.row(i));
        }
        margins(i) = f;
    }
    double n_pos = 0, n_neg = 0;
    for (Eigen::Index i = 0; i < n; ++i) (sy(i) > 0 ? n_pos : n_neg) += 1.0;
    const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    const double t_neg = 1.0 / (n_neg + 2.0);
    double a_platt = 0.0, b_platt = std::log((n_neg + 1.0) / (n_pos + 1.0));
    for (int iter = 0; iter < 100; ++iter) {
        double g_a = 0, g_b = 0, h_aa = 1e-12, h_ab = 0, h_bb = 1e-12;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double target = sy(i) > 0 ? t_pos : t_neg;
            const double p = sigmoid(-(a_platt * margins(i) + b_platt));
            const double diff = target - p; // dF/dz of the cross entropy in z = A f + B
            g_a += diff * margins(i);
            g_b += diff;
            const double w = std::max(p * (1.0 - p), 1e-12);
            h_aa += w * margins(i) * margins(i);
            h_ab += w * margins(i);
            h_bb += w;
        }
        const double det = h_aa * h_bb - h_ab * h_ab;
        const double da = -(h_bb * g_a - h_ab * g_b) / det;
        const double db = -(-h_ab * g_a + h_aa * g_b) / det;
        a_platt += da;
        b_platt += db;
        if (std::abs(da) + std::abs(db) < 1e-10) break;
    }
    model.platt_a = a_platt;
    model.platt_b = b_platt;
    return model;
}

Vector predict_svm(const SvmModel& m, const Matrix& x) {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double f = m.bias;
        for (Eigen::Index s = 0; s < m.support.rows(); ++s) {
            f += m.alpha_y(s) * kernel_eval(m, m.support.row(s), x.row(i));
        }
        out(i) = sigmoid(-(m.platt_a * f + m.platt_b));
    }
    return out;
}

// ------------------------------------------------------------- forest ------

struct TreeBuilder {
    const Matrix& x;
    const std::vector<int>& y;
    int max_depth;
    int mtry;
    Rng& rng;
    std::vector<TreeNode> nodes;

    double positive_fraction(const std::vector<Eigen::Index>& rows) const {
        double p = 0;
        for (Eigen::Index r : rows) p += y[static_cast<std::size_t>(r)];
        return p / static_cast<double>(rows.size());
    }

    int build(std::vector<Eigen::Index> rows, int depth) {
        const int index = static_cast<int>(nodes.size());
        nodes.push_back(TreeNode{});
        const double frac = positive_fraction(rows);
        if (depth >= max_depth || rows.size() < 2 || frac == 0.0 || frac == 1.0) {
            nodes[static_cast<std::size_t>(index)].leaf_positive_fraction = frac;
            return index;
        }

        // feature subsample without replacement
        std::vector<int> features(static_cast<std::size_t>(x.cols()));
        std::iota(features.begin(), features.end(), 0);
        for (int i = 0; i < mtry && i + 1 < static_cast<int>(features.size()); ++i) {
            const auto j = static_cast<std::size_t>(i) +
                           rng.uniform_int(static_cast<std::uint64_t>(features.size() - static_cast<std::size_t>(i)));
            std::swap(features[static_cast<std::size_t>(i)], features[j]);
        }
        features.resize(static_cast<std::size_t>(std::min<int>(mtry, static_cast<int>(x.cols()))));

        const double n = static_cast<double>(rows.size());
        const double parent_gini = 2.0 * frac * (1.0 - frac);
        double best_gain = 1e-12;
        int best_feature = -1;
        double best_threshold = 0;
        for (int f : features) {
            std::vector<std::pair<double, int>> values;
            values.reserve(rows.size());
            for (Eigen::Index r : rows) values.push_back({x(r, f), y[static_cast<std::size_t>(r)]});
            std::sort(values.begin(), values.end());
            double left_n = 0, left_pos = 0, total_pos = 0;
            for (const auto& [v, label] : values) total_pos += label;
            for (std::size_t i = 0; i + 1 < values.size(); ++i) {
                left_n += 1.0;
                left_pos += values[i].second;
                if (values[i].first == values[i + 1].first) continue;
                const double right_n = n - left_n;
                const double right_pos = total_pos - left_pos;
                const double pl = left_pos / left_n, pr = right_pos / right_n;
                const double gini =
                    left_n / n * 2.0 * pl * (1.0 - pl) + right_n / n * 2.0 * pr * (1.0 - pr);
                const double gain = parent_gini - gini;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (values[i].first + values[i + 1].first);
                }
            }
        }
        if (best_feature < 0) {
            nodes[static_cast<std::size_t>(index)].leaf_positive_fraction = frac;
            return index;
        }

        std::vector<Eigen::Index> left, right;
        for (Eigen::Index r : rows) {
            (x(r, best_feature) <= best_threshold ? left : right).push_back(r);
        }
        nodes[static_cast<std::size_t>(index)].feature = best_feature;
        nodes[static_cast<std::size_t>(index)].threshold = best_threshold;
        const int l = build(std::move(left), depth + 1);
        const int r = build(std::move(right), depth + 1);
        nodes[static_cast<std::size_t>(index)].left = l;
        nodes[static_cast<std::size_t>(index)].right = r;
        return index;
    }
};

ForestModel train_forest(const Matrix& x, const std::vector<int>& y, int n_trees, int max_depth,
                         std::uint64_t stream) {
    ForestModel model;
    model.trees.resize(static_cast<std::size_t>(n_trees));
    const int mtry =
        std::max(1, static_cast<int>(std::round(std::sqrt(static_cast<double>(x.cols())))));
    for (int t = 0; t < n_trees; ++t) {
        Rng rng = Rng::derive(stream, "tree", {static_cast<std::uint64_t>(t)});
        std::vector<Eigen::Index> rows(static_cast<std::size_t>(x.rows()));
        for (auto& r : rows) {
            r = static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(x.rows())));
        }
        TreeBuilder builder{x, y, max_depth, mtry, rng, {}};
        builder.build(std::move(rows), 0);
        model.trees[static_cast<std::size_t>(t)] = std::move(builder.nodes);
    }
    return model;
}

Vector predict_forest(const ForestModel& m, const Matrix& x) {
    Vector out = Vector::Zero(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double votes = 0;
        for (const auto& tree : m.trees) {
            int node = 0;
            while (tree[static_cast<std::size_t>(node)].feature >= 0) {
                const auto& nd = tree[static_cast<std::size_t>(node)];
                node = x(i, nd.feature) <= nd.threshold ? nd.left : nd.right;
            }
            const double frac = tree[static_cast<std::size_t>(node)].leaf_positive_fraction;
            // a tree votes positive above one half; an exactly split leaf
            // contributes half a vote
            votes += frac > 0.5 ? 1.0 : (frac == 0.5 ? 0.5 : 0.0);
        }
        out(i) = votes / static_cast<double>(m.trees.size());
    }
    return out;
}

// -------------------------------------------------------- naive bayes ------

NaiveBayesModel train_naive_bayes(const Matrix& x, const std::vector<int>& y) {
    NaiveBayesModel m;
    const Eigen::Index d = x.cols();
    m.mean0 = Vector::Zero(d);
    m.mean1 = Vector::Zero(d);
    m.var0 = Vector::Zero(d);
    m.var1 = Vector::Zero(d);
    double n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) {
            m.mean1 += x.row(static_cast<Eigen::Index>(i)).transpose();
            n1 += 1;
        } else {
            m.mean0 += x.row(static_cast<Eigen::Index>(i)).transpose();
            n0 += 1;
        }
    }
    m.mean0 /= n0;
    m.mean1 /= n1;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const Vector d2 = x.row(static_cast<Eigen::Index>(i)).transpose() -
                          (y[i] == 1 ? m.mean1 : m.mean0);
        (y[i] == 1 ? m.var1 : m.var0) += d2.cwiseProduct(d2);
    }
    m.var0 /= n0;
    m.var1 /= n1;

    double max_var = 0;
    for (Eigen::Index c = 0; c < d; ++c) max_var = std::max({max_var, m.var0(c), m.var1(c)});
    const double eps = 1e-9 * std::max(max_var, 1.0);
    m.var0.array() += eps;
    m.var1.array() += eps;
    m.prior_positive = n1 / (n0 + n1);
    return m;
}

Vector predict_naive_bayes(const NaiveBayesModel& m, const Matrix& x) {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double l0 = std::log(1.0 - m.prior_positive), l1 = std::log(m.prior_positive);
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            const double v = x(i, c);
            l0 += -0.5 * (std::log(2.0 * M_PI * m.var0(c)) +
                          (v - m.mean0(c)) * (v - m.mean0(c)) / m.var0(c));
            l1 += -0.5 * (std::log(2.0 * M_PI * m.var1(c)) +
                          (v - m.mean1(c)) * (v - m.mean1(c)) / m.var1(c));
        }
        const double peak = std::max(l0, l1);
        out(i) = std::exp(l1 - peak) / (std::exp(l0 - peak) + std::exp(l1 - peak));
    }
    return out;
}

// ------------------------------------------------- discriminant (LDA/QDA) --

/// Ridge-regularized inverse: sigma + (ridge * tr/d) I, with an automatic
/// bump when the result is still numerically singular.
void invert_covariance(Matrix sigma, double ridge, Matrix& inverse, double& log_det) {
    const Eigen::Index d = sigma.rows();
    const double scale = std::max(sigma.trace() / static_cast<double>(d), 1e-12);
    sigma.diagonal().array() += ridge * scale;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma);
    const double floor = std::max(1e-10 * std::max(eig.eigenvalues().maxCoeff(), scale), 1e-300);
    Vector ev = eig.eigenvalues().cwiseMax(floor);
    log_det = ev.array().log().sum();
    inverse = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

DiscriminantModel train_discriminant(const Matrix& x, const std::vector<int>& y, bool quadratic,
                                     double ridge) {
    const Eigen::Index d = x.cols();
    DiscriminantModel m;
    m.quadratic = quadratic;
    m.mean0 = Vector::Zero(d);
    m.mean1 = Vector::Zero(d);
    double n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) {
            m.mean1 += x.row(static_cast<Eigen::Index>(i)).transpose();
            n1 += 1;
        } else {
            m.mean0 += x.row(static_cast<Eigen::Index>(i)).transpose();
            n0 += 1;
        }
    }
    if (n0 < 2 || n1 < 2) throw DegenerateWorkflow("discriminant analysis needs 2 samples per class");
    m.mean0 /= n0;
    m.mean1 /= n1;
    m.prior_positive = n1 / (n0 + n1);

    Matrix s0 = Matrix::Zero(d, d), s1 = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const Vector dev = x.row(static_cast<Eigen::Index>(i)).transpose() -
                           (y[i] == 1 ? m.mean1 : m.mean0);
        (y[i] == 1 ? s1 : s0) += dev * dev.transpose();
    }
    if (quadratic) {
        invert_covariance(s0 / n0, ridge, m.cov_inv0, m.log_det0);
        invert_covariance(s1 / n1, ridge, m.cov_inv1, m.log_det1);
    } else {
        const Matrix pooled = (s0 + s1) / (n0 + n1);
        invert_covariance(pooled, ridge, m.cov_inv0, m.log_det0);
        m.cov_inv1 = m.cov_inv0;
        m.log_det1 = m.log_det0;
    }
    return m;
}

Vector predict_discriminant(const DiscriminantModel& m, const Matrix& x) {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Vector v = x.row(i).transpose();
        const Vector d0 = v - m.mean0;
        const Vector d1 = v - m.mean1;
        const double g0 = std::log(1.0 - m.prior_positive) - 0.5 * m.log_det0 -
                          0.5 * d0.dot(m.cov_inv0 * d0);
        const double g1 =
            std::log(m.prior_positive) - 0.5 * m.log_det1 - 0.5 * d1.dot(m.cov_inv1 * d1);
        const double peak = std::max(g0, g1);
        out(i) = std::exp(g1 - peak) / (std::exp(g0 - peak) + std::exp(g1 - peak));
    }
    return out;
}

} // namespace

ClassifierModel train_classifier(const WorkflowConfig& config, const Matrix& x,
                                 const std::vector<int>& y) {
    check_finite(x);
    if (static_cast<std::size_t>(x.rows()) != y.size() || y.empty()) {
        throw DataError("train_classifier x/y mismatch");
    }
    switch (config.classifier) {
        case ClassifierKind::Logistic: return train_logistic(x, y, config.logistic_lambda);
        case ClassifierKind::Svm:
            return train_svm(x, y, config.svm_kernel, config.svm_c, config.svm_gamma);
        case ClassifierKind::RandomForest:
            return train_forest(x, y, config.rf_trees, config.rf_depth, config.rng_stream);
        case ClassifierKind::NaiveBayes: return train_naive_bayes(x, y);
        case ClassifierKind::Lda: return train_discriminant(x, y, false, config.da_ridge);
        case ClassifierKind::Qda: return train_discriminant(x, y, true, config.da_ridge);
    }
    throw DataError("unknown classifier kind");
}

Vector predict_proba(const ClassifierModel& model, const Matrix& x) {
    check_finite(x);
    Vector p = std::visit(
        [&](const auto& m) -> Vector {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogisticModel>) return predict_logistic(m, x);
            else if constexpr (std::is_same_v<T, SvmModel>) return predict_svm(m, x);
            else if constexpr (std::is_same_v<T, ForestModel>) return predict_forest(m, x);
            else if constexpr (std::is_same_v<T, NaiveBayesModel>) return predict_naive_bayes(m, x);
            else return predict_discriminant(m, x);
        },
        model);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = std::clamp(p(i), 0.0, 1.0);
    return p;
}

} // namespace radml::pipeline
