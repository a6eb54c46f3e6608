#include "doctest.h"

#include "radml/rng.hpp"
#include "radml/stats13.hpp"

#include <cmath>

using namespace radml;

TEST_CASE("stats13 basic arithmetic") {
    auto s = stats13({1, 2, 3});
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.median == doctest::Approx(2.0));
    CHECK(s.range == doctest::Approx(2.0));
    CHECK(s.energy == doctest::Approx(14.0));
    CHECK(s.min == 1.0);
    CHECK(s.max == 3.0);
}

TEST_CASE("stats13 degenerate conventions for constant input") {
    auto s = stats13({7, 7, 7});
    CHECK(s.std_dev == 0.0);
    CHECK(s.skewness == 0.0);
    CHECK(s.kurtosis == 0.0);
    CHECK(s.entropy == 0.0);
    CHECK(s.peak == 3.0);
    CHECK(s.peak_position == 7.0);
    CHECK(s.quartile_range == 0.0);
}

TEST_CASE("stats13 sample skewness of a normal draw stays near zero") {
    Rng rng = Rng::derive(7, "stats13-normal");
    std::vector<double> draws;
    draws.reserve(1000);
    for (int i = 0; i < 1000; ++i) draws.push_back(rng.normal());
    auto s = stats13(draws);
    CHECK(std::abs(s.skewness) < 0.25);
    CHECK(std::abs(s.mean) < 0.15);
    CHECK(s.std_dev == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("stats13 quartile range uses linear interpolation") {
    // 0..100: P75 = 75, P25 = 25
    std::vector<double> v;
    for (int i = 0; i <= 100; ++i) v.push_back(i);
    auto s = stats13(v);
    CHECK(s.quartile_range == doctest::Approx(50.0));
    CHECK(s.median == doctest::Approx(50.0));
}

TEST_CASE("stats13 median of even count averages the middle pair") {
    auto s = stats13({1, 2, 3, 10});
    CHECK(s.median == doctest::Approx(2.5));
}

TEST_CASE("quantize splits the range into equal-width bins") {
    SUBCASE("documented 16-level example") {
        auto q = quantize({0, 5, 10, 15}, 16);
        CHECK(q == std::vector<int>{0, 5, 10, 15});
    }
    SUBCASE("constant input maps to level 0") {
        auto q = quantize({7, 7, 7}, 16);
        CHECK(q == std::vector<int>{0, 0, 0});
    }
    SUBCASE("two levels") {
        auto q = quantize({0, 15}, 2);
        CHECK(q == std::vector<int>{0, 1});
    }
    SUBCASE("max value clamps into the top bin") {
        auto q = quantize({0, 1, 2, 3}, 4);
        CHECK(q.back() == 3);
    }
}

TEST_CASE("percentile endpoints") {
    std::vector<double> v = {3, 1, 2};
    CHECK(percentile(v, 0) == 1.0);
    CHECK(percentile(v, 100) == 3.0);
    CHECK(percentile(v, 50) == 2.0);
}
