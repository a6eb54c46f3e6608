#include "doctest.h"

#include "radml/pipeline.hpp"
#include "radml/rng.hpp"

#include <cmath>

using namespace radml;
using namespace radml::pipeline;

namespace {

void imbalanced(int minority, int majority, Matrix& x, std::vector<int>& y, std::uint64_t seed) {
    Rng rng = Rng::derive(seed, "imbalanced");
    x.resize(minority + majority, 2);
    y.clear();
    for (int i = 0; i < minority; ++i) {
        x(i, 0) = rng.normal() + 2.0;
        x(i, 1) = rng.normal();
        y.push_back(1);
    }
    for (int i = 0; i < majority; ++i) {
        x(minority + i, 0) = rng.normal() - 2.0;
        x(minority + i, 1) = rng.normal();
        y.push_back(0);
    }
}

std::pair<int, int> counts(const std::vector<int>& y) {
    int pos = 0, neg = 0;
    for (int v : y) (v == 1 ? pos : neg)++;
    return {pos, neg};
}

} // namespace

TEST_CASE("balanced input is unchanged by random over-sampling") {
    Matrix x;
    std::vector<int> y;
    imbalanced(15, 15, x, y, 1);
    Rng rng(7);
    auto r = resample(x, y, ResamplerKind::RandomOver, 1, rng);
    CHECK(r.y.size() == 30);
    auto [pos, neg] = counts(r.y);
    CHECK(pos == 15);
    CHECK(neg == 15);
}

TEST_CASE("smote equalizes 10/30 to 30/30") {
    Matrix x;
    std::vector<int> y;
    imbalanced(10, 30, x, y, 2);
    Rng rng(8);
    auto r = resample(x, y, ResamplerKind::Smote, 1, rng);
    auto [pos, neg] = counts(r.y);
    CHECK(pos == 30);
    CHECK(neg == 30);
    CHECK(r.notes.empty());
}

TEST_CASE("smote synthetics stay on the minority segment") {
    // six minority points on the diagonal, majority far away
    Matrix x(16, 2);
    std::vector<int> y;
    for (int i = 0; i < 6; ++i) {
        x(i, 0) = 0.25 * i;
        x(i, 1) = 0.25 * i;
        y.push_back(1);
    }
    Rng noise = Rng::derive(3, "maj");
    for (int i = 0; i < 10; ++i) {
        x(6 + i, 0) = 100.0 + noise.normal();
        x(6 + i, 1) = -100.0 + noise.normal();
        y.push_back(0);
    }
    Rng rng(9);
    auto r = resample(x, y, ResamplerKind::Smote, 1, rng);
    for (Eigen::Index i = 16; i < r.x.rows(); ++i) {
        CHECK(r.x(i, 0) == doctest::Approx(r.x(i, 1)).epsilon(1e-12)); // on the diagonal
        CHECK(r.x(i, 0) >= -1e-12);
        CHECK(r.x(i, 0) <= 1.25 + 1e-12);
    }
}

TEST_CASE("tiny minority falls back to random over-sampling with a note") {
    Matrix x;
    std::vector<int> y;
    imbalanced(3, 20, x, y, 4);
    Rng rng(10);
    auto r = resample(x, y, ResamplerKind::Adasyn, 1, rng);
    auto [pos, neg] = counts(r.y);
    CHECK(pos == neg);
    REQUIRE(!r.notes.empty());
    CHECK(r.notes[0].find("fell back") != std::string::npos);
}

TEST_CASE("random under-sampling reduces the majority to the minority count") {
    Matrix x;
    std::vector<int> y;
    imbalanced(8, 25, x, y, 5);
    Rng rng(11);
    auto r = resample(x, y, ResamplerKind::RandomUnder, 1, rng);
    auto [pos, neg] = counts(r.y);
    CHECK(pos == 8);
    CHECK(neg == 8);
}

TEST_CASE("near-miss keeps minority-adjacent majority samples") {
    Matrix x;
    std::vector<int> y;
    imbalanced(8, 30, x, y, 6);
    for (int version : {1, 2, 3}) {
        Rng rng(12);
        auto r = resample(x, y, ResamplerKind::NearMiss, version, rng);
        auto [pos, neg] = counts(r.y);
        CHECK(pos == 8);
        CHECK(neg == 8);
    }
}

TEST_CASE("cleaning rules keep both classes") {
    Matrix x;
    std::vector<int> y;
    imbalanced(10, 25, x, y, 7);
    for (ResamplerKind kind : {ResamplerKind::NeighborhoodCleaning, ResamplerKind::SmoteTomek,
                               ResamplerKind::SmoteEnn}) {
        Rng rng(13);
        auto r = resample(x, y, kind, 1, rng);
        auto [pos, neg] = counts(r.y);
        CAPTURE(to_string(kind));
        CHECK(pos > 0);
        CHECK(neg > 0);
    }
}

TEST_CASE("adasyn equalizes the classes") {
    Matrix x;
    std::vector<int> y;
    imbalanced(10, 24, x, y, 8);
    Rng rng(14);
    auto r = resample(x, y, ResamplerKind::Adasyn, 1, rng);
    auto [pos, neg] = counts(r.y);
    CHECK(pos == 24);
    CHECK(neg == 24);
}

TEST_CASE("resampling is deterministic in the rng stream") {
    Matrix x;
    std::vector<int> y;
    imbalanced(9, 22, x, y, 9);
    for (ResamplerKind kind : {ResamplerKind::RandomOver, ResamplerKind::RandomUnder,
                               ResamplerKind::Smote, ResamplerKind::SmoteBorderline,
                               ResamplerKind::Adasyn}) {
        Rng r1(77), r2(77);
        auto a = resample(x, y, kind, 1, r1);
        auto b = resample(x, y, kind, 1, r2);
        CAPTURE(to_string(kind));
        CHECK(a.y == b.y);
        CHECK((a.x - b.x).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("single-class input is an error") {
    Matrix x(4, 1);
    x << 1, 2, 3, 4;
    std::vector<int> y = {1, 1, 1, 1};
    Rng rng(15);
    CHECK_THROWS_AS(resample(x, y, ResamplerKind::Smote, 1, rng), DataError);
}
