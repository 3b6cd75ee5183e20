#include <cmath>
#include <random>

#include "doctest.h"
#include "stormgrid/error.hpp"
#include "stormgrid/feature_engine.hpp"

using namespace stormgrid;

namespace {

// published row, rescaled so it sums to one
std::vector<double> scheme1() {
    std::vector<double> w{0.236, 0.146, 0.182, 0.078, 0.105, 0.081, 0.169};
    double s = 0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;
    return w;
}

const std::vector<double> kScheme1 = scheme1();

}  // namespace

TEST_CASE("feature names") {
    CHECK(feature_names().size() == kFeatureCount);
    CHECK(feature_name(Feature::OpTime) == "op_time");
    CHECK(feature_from_name("slope") == Feature::Slope);
    CHECK_FALSE(feature_from_name("humidity").has_value());
}

TEST_CASE("rain intensity conversion") {
    CHECK(rain_10min(0) == 0.0);
    CHECK(rain_10min(1) == doctest::Approx(27.08));
    CHECK(rain_10min(100) == doctest::Approx(27.08 * std::pow(100.0, 0.6021)));
    CHECK(std::abs(rain_10min(100) - 433.4) < 0.1);
    // increasing and concave, by finite differences
    for (double r = 0.01; r < 50; r += 0.37) {
        const double h = 1e-3;
        const double a = rain_10min(r - h), b = rain_10min(r), c = rain_10min(r + h);
        CHECK(c > b);
        CHECK(a + c - 2 * b < 0.0);
    }
}

TEST_CASE("direction-aware normalization") {
    const FeatureRange plus{0, 60, Sign::Positive};
    const FeatureRange minus{20, 50, Sign::Negative};
    CHECK(normalize(60, plus) == 1.0);
    CHECK(normalize(50, minus) == 0.0);
    CHECK(normalize(30, plus) == doctest::Approx(0.5));
    CHECK(normalize(35, minus) == doctest::Approx(0.5));
    CHECK(normalize(500, plus) == 1.0);
    CHECK(normalize(-5, plus) == 0.0);
    CHECK(normalize(0, minus) == 1.0);
}

TEST_CASE("score bounds") {
    const auto ranges = default_feature_ranges();
    const auto b = score_bounds(kScheme1, ranges);
    CHECK(b.min == doctest::Approx(0.0));
    CHECK(b.max == doctest::Approx(1.0).epsilon(1e-12));

    const std::vector<double> one{1.0};
    const std::vector<FeatureRange> r1{{0, 10, Sign::Negative}};
    CHECK(score_bounds(one, r1).min == 0.0);
    CHECK(score_bounds(one, r1).max == 1.0);

    const std::vector<double> halves{0.5, 0.5};
    const std::vector<FeatureRange> fixed{{0, 10, Sign::Positive}, {3, 3, Sign::Positive}};
    try {
        score_bounds(halves, fixed);
        FAIL("expected NondegenerateRangeRequired");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NondegenerateRangeRequired);
    }
    CHECK_THROWS_AS(score_bounds(one, fixed), Error);
}

TEST_CASE("correction coefficient") {
    const ScoreBounds b{0, 1};
    CHECK(correction_coefficient(0, b).k == doctest::Approx(0.9));
    CHECK(correction_coefficient(1, b).k == doctest::Approx(1.4));
    CHECK(correction_coefficient(0.5, b).k == doctest::Approx(1.15));
    const auto over = correction_coefficient(1.2, b);
    CHECK(over.k == doctest::Approx(1.4));
    CHECK(over.clamped);
    CHECK_FALSE(correction_coefficient(0.3, b).clamped);
    const ScoreBounds shifted{0.2, 0.6};
    CHECK(correction_coefficient(0.4, shifted).k == doctest::Approx(1.15));
}

TEST_CASE("k stays in band and moves with the feature signs") {
    const CorrectionModel model(kScheme1, default_feature_ranges());
    const auto ranges = model.ranges();
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        FeatureVector x{};
        for (std::size_t i = 0; i < kFeatureCount; ++i)
            x[i] = std::uniform_real_distribution<double>(ranges[i].min - 10, ranges[i].max + 10)(rng);
        const auto k = model.coefficient(x);
        CHECK(k.k >= 0.9);
        CHECK(k.k <= 1.4);
        CHECK_FALSE(k.clamped);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            auto y = x;
            y[i] += 1.0;
            const double k2 = model.coefficient(y).k;
            if (ranges[i].sign == Sign::Positive) {
                CHECK(k2 >= k.k - 1e-15);
            } else {
                CHECK(k2 <= k.k + 1e-15);
            }
        }
    }
}

TEST_CASE("op_time sign flag") {
    CHECK(default_feature_ranges()[6].sign == Sign::Negative);
    CHECK(default_feature_ranges(true)[6].sign == Sign::Positive);
    CHECK(default_feature_ranges()[5].sign == Sign::Negative);
}

TEST_CASE("wind span angle folds into [0, 180]") {
    CHECK(wind_span_angle(90, 0) == doctest::Approx(90));
    CHECK(wind_span_angle(270, 0) == doctest::Approx(90));
    CHECK(wind_span_angle(10, 350) == doctest::Approx(20));
    CHECK(wind_span_angle(180, 0) == doctest::Approx(180));
    CHECK(wind_span_angle(45, 45) == doctest::Approx(0));
}

TEST_CASE("unit features convert rain") {
    const auto f = unit_features(41, 1.0, 30, 12, 80, 45, 9);
    CHECK(f[0] == 41);
    CHECK(f[1] == doctest::Approx(27.08));
    CHECK(f[5] == 45);
    CHECK(f[6] == 9);
}

TEST_CASE("correction model normalizes weights") {
    std::vector<double> w(kFeatureCount, 2.0);
    const CorrectionModel m(w, default_feature_ranges());
    for (double x : m.weights()) CHECK(x == doctest::Approx(1.0 / 7));
    CHECK_THROWS_AS(CorrectionModel(std::vector<double>{1, 2}, default_feature_ranges()), Error);
}
