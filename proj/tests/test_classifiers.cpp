#include "doctest.h"

#include "radml/pipeline.hpp"
#include "radml/rng.hpp"

#include <cmath>

using namespace radml;
using namespace radml::pipeline;

namespace {

/// Two Gaussian blobs, linearly separable when the gap is large.
void blobs(int n_per_class, double gap, std::uint64_t seed, Matrix& x, std::vector<int>& y) {
    Rng rng = Rng::derive(seed, "blobs");
    x.resize(2 * n_per_class, 2);
    y.clear();
    for (int i = 0; i < 2 * n_per_class; ++i) {
        const int label = i % 2;
        x(i, 0) = rng.normal() + (label == 1 ? gap : -gap);
        x(i, 1) = rng.normal();
        y.push_back(label);
    }
}

double accuracy(const Vector& p, const std::vector<int>& y) {
    double correct = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        correct += ((p(i) >= 0.5 ? 1 : 0) == y[static_cast<std::size_t>(i)]);
    }
    return correct / static_cast<double>(p.size());
}

// Test-side logistic loss/gradient used to validate the trained optimum.
double logistic_loss(const Matrix& xa, const Vector& t, double lambda, const Vector& w) {
    double value = 0.5 * lambda * w.squaredNorm();
    const Vector f = xa * w;
    for (Eigen::Index i = 0; i < xa.rows(); ++i) {
        const double sf = (t(i) > 0.5 ? 1.0 : -1.0) * f(i);
        value += sf > 0 ? std::log1p(std::exp(-sf)) : -sf + std::log1p(std::exp(sf));
    }
    return value;
}

Vector logistic_grad(const Matrix& xa, const Vector& t, double lambda, const Vector& w) {
    const Vector f = xa * w;
    Vector p(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) p(i) = 1.0 / (1.0 + std::exp(-f(i)));
    return xa.transpose() * (p - t) + lambda * w;
}

} // namespace

TEST_CASE("logistic regression separates separable blobs perfectly") {
    Matrix x;
    std::vector<int> y;
    blobs(50, 4.0, 7, x, y);
    WorkflowConfig config;
    config.classifier = ClassifierKind::Logistic;
    config.logistic_lambda = 1e-3;
    auto model = train_classifier(config, x, y);
    CHECK(accuracy(predict_proba(model, x), y) == 1.0);
}

TEST_CASE("logistic gradient matches central finite differences") {
    Matrix x;
    std::vector<int> y;
    blobs(20, 1.0, 13, x, y);
    Matrix xa(x.rows(), 3);
    xa.leftCols(2) = x;
    xa.col(2).setOnes();
    Vector t(x.rows());
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = y[static_cast<std::size_t>(i)];
    const double lambda = 0.37;

    Rng rng = Rng::derive(3, "grad-points");
    for (int trial = 0; trial < 20; ++trial) {
        Vector w(3);
        for (int c = 0; c < 3; ++c) w(c) = rng.uniform(-2.0, 2.0);
        const Vector g = logistic_grad(xa, t, lambda, w);
        for (int c = 0; c < 3; ++c) {
            const double h = 1e-6 * std::max(1.0, std::abs(w(c)));
            Vector wp = w, wm = w;
            wp(c) += h;
            wm(c) -= h;
            const double fd = (logistic_loss(xa, t, lambda, wp) - logistic_loss(xa, t, lambda, wm)) /
                              (2.0 * h);
            CHECK(g(c) == doctest::Approx(fd).epsilon(1e-6));
        }
    }

    // the trained optimum drives this gradient to zero
    WorkflowConfig config;
    config.classifier = ClassifierKind::Logistic;
    config.logistic_lambda = lambda;
    auto model = train_classifier(config, x, y);
    const auto& lm = std::get<LogisticModel>(model);
    CHECK(logistic_grad(xa, t, lambda, lm.weights).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("naive Bayes recovers the analytic boundary of its own model") {
    Rng rng = Rng::derive(21, "gnb");
    const int n = 2000;
    Matrix x(n, 1);
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
        const int label = i % 2;
        x(i, 0) = rng.normal() + (label == 1 ? 2.0 : 0.0);
        y.push_back(label);
    }
    WorkflowConfig config;
    config.classifier = ClassifierKind::NaiveBayes;
    auto model = train_classifier(config, x, y);

    // analytic Bayes boundary of N(0,1) vs N(2,1) with equal priors: x = 1
    double crossing = -10;
    Matrix probe(1, 1);
    for (double v = -2.0; v <= 4.0; v += 0.001) {
        probe(0, 0) = v;
        if (predict_proba(model, probe)(0) >= 0.5) {
            crossing = v;
            break;
        }
    }
    CHECK(crossing == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("probabilities live in [0,1] and complement to 1") {
    Matrix x;
    std::vector<int> y;
    blobs(20, 2.0, 5, x, y);
    for (ClassifierKind kind : {ClassifierKind::Logistic, ClassifierKind::Svm,
                                ClassifierKind::RandomForest, ClassifierKind::NaiveBayes,
                                ClassifierKind::Lda, ClassifierKind::Qda}) {
        WorkflowConfig config;
        config.classifier = kind;
        config.rf_trees = 25;
        config.rf_depth = 6;
        config.rng_stream = 99;
        auto model = train_classifier(config, x, y);
        const Vector p = predict_proba(model, x);
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            CHECK(p(i) >= 0.0);
            CHECK(p(i) <= 1.0);
            const double complement = 1.0 - p(i);
            CHECK(p(i) + complement == 1.0);
        }
    }
}

TEST_CASE("LDA with equal priors and identity covariance uses the midpoint rule") {
    Matrix x(4, 1);
    x << -2.0, 0.0, 2.0, 4.0; // class means -1 and 3, pooled variance 1
    std::vector<int> y = {0, 0, 1, 1};
    WorkflowConfig config;
    config.classifier = ClassifierKind::Lda;
    config.da_ridge = 0.0;
    auto model = train_classifier(config, x, y);

    Matrix probe(3, 1);
    probe << 1.0, 0.5, 1.5; // midpoint of the means and its neighbors
    const Vector p = predict_proba(model, probe);
    CHECK(p(0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p(1) < 0.5);
    CHECK(p(2) > 0.5);
}

TEST_CASE("QDA survives singular within-class covariance through the ridge") {
    Matrix x(8, 2);
    std::vector<int> y;
    for (int i = 0; i < 8; ++i) {
        x(i, 0) = i % 2 == 0 ? -1.0 - i * 0.1 : 1.0 + i * 0.1;
        x(i, 1) = 5.0; // constant: singular covariance
        y.push_back(i % 2);
    }
    WorkflowConfig config;
    config.classifier = ClassifierKind::Qda;
    config.da_ridge = 0.0; // even with no explicit ridge, the guard kicks in
    auto model = train_classifier(config, x, y);
    const Vector p = predict_proba(model, x);
    for (Eigen::Index i = 0; i < p.size(); ++i) CHECK(std::isfinite(p(i)));
    CHECK(accuracy(p, y) == 1.0);
}

TEST_CASE("svm separates blobs and handles nonlinearity with the rbf kernel") {
    Matrix x;
    std::vector<int> y;
    blobs(30, 3.0, 17, x, y);
    WorkflowConfig config;
    config.classifier = ClassifierKind::Svm;
    config.svm_kernel = SvmKernel::Linear;
    config.svm_c = 10.0;
    auto model = train_classifier(config, x, y);
    CHECK(accuracy(predict_proba(model, x), y) == 1.0);

    // XOR needs the RBF kernel
    Matrix xx(8, 2);
    xx << 1, 1, -1, -1, 1, -1, -1, 1, 2, 2, -2, -2, 2, -2, -2, 2;
    std::vector<int> yy = {1, 1, 0, 0, 1, 1, 0, 0};
    config.svm_kernel = SvmKernel::Rbf;
    config.svm_gamma = 0.5;
    config.svm_c = 100.0;
    auto rbf = train_classifier(config, xx, yy);
    CHECK(accuracy(predict_proba(rbf, xx), yy) == 1.0);
}

TEST_CASE("random forest is deterministic in its stream and fits the training set") {
    Matrix x;
    std::vector<int> y;
    blobs(40, 2.5, 23, x, y);
    WorkflowConfig config;
    config.classifier = ClassifierKind::RandomForest;
    config.rf_trees = 60;
    config.rf_depth = 10;
    config.rng_stream = 4242;
    auto a = train_classifier(config, x, y);
    auto b = train_classifier(config, x, y);
    const Vector pa = predict_proba(a, x);
    const Vector pb = predict_proba(b, x);
    CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);
    CHECK(accuracy(pa, y) >= 0.97);
}
