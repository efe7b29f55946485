#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "avate/dgp.hpp"
#include "doctest.h"

using namespace avate;

TEST_CASE("bernoulli design: exact effect, saturation, and MC check") {
    const Dgp dgp(DgpConfig{DgpConfig::Kind::Bernoulli, 0.1});
    CHECK(dgp.ate() == doctest::Approx(0.1));

    Rng rng(1, 0);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x = dgp.draw_context(rng);
        CHECK(dgp.mean(1, x) - dgp.mean(0, x) == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(dgp.mean(1, x) <= 1.0);
        CHECK(dgp.mean(0, x) >= 0.0);
    }

    // Saturated logits: p -> 0.9 + 0.1a along +beta, p -> 0.1a along -beta.
    const std::vector<double> bigpos{-20.0, -30.0, 50.0};
    CHECK(dgp.mean(1, bigpos) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dgp.mean(0, bigpos) == doctest::Approx(0.9).epsilon(1e-9));
    const std::vector<double> bigneg{20.0, 30.0, -50.0};
    CHECK(dgp.mean(1, bigneg) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(dgp.mean(0, bigneg) == doctest::Approx(0.0).epsilon(1e-9));

    // Potential-outcome Monte Carlo for the average effect.
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
        const std::vector<double> x = dgp.draw_context(rng);
        sum += dgp.draw_outcome(rng, 1, x) - dgp.draw_outcome(rng, 0, x);
    }
    CHECK(std::abs(sum / n - 0.1) < 0.002);
}

TEST_CASE("bernoulli design: theta0 outside [0, 0.1] is rejected") {
    CHECK_THROWS_AS(Dgp(DgpConfig{DgpConfig::Kind::Bernoulli, 0.2}), ConfigError);
    CHECK_THROWS_AS(Dgp(DgpConfig{DgpConfig::Kind::Bernoulli, -0.05}), ConfigError);
}

TEST_CASE("bounded design: mean-zero noise and heteroskedastic treated arm") {
    const Dgp dgp(DgpConfig{DgpConfig::Kind::Bounded, 0.1});
    CHECK(dgp.ate() == doctest::Approx(0.1));

    // Implied outcome range from the parameter choices.
    CHECK(dgp.range().lo == doctest::Approx(0.225));
    CHECK(dgp.range().hi == doctest::Approx(0.775));

    Rng rng(2, 0);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> x = dgp.draw_context(rng);
        CHECK(dgp.mean(1, x) - dgp.mean(0, x) == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(dgp.variance(0, x) == doctest::Approx(1.0 / 1200.0));
        // Var(y|1,x) = (9 x.beta)^2 / 12.
        double xb = -0.04 * x[0] - 0.01 * x[1] + 0.05 * x[2];
        CHECK(dgp.variance(1, x) == doctest::Approx(81.0 * xb * xb / 12.0).epsilon(1e-12));
    }

    // Conditional moments at a fixed context, by Monte Carlo.
    const std::vector<double> x0{0.9, 0.1, 0.05};
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double y = dgp.draw_outcome(rng, 1, x0);
        CHECK(dgp.range().contains(y));
        sum += y;
        sum2 += y * y;
    }
    const double mean = sum / n;
    CHECK(mean == doctest::Approx(dgp.mean(1, x0)).epsilon(2e-3));
    CHECK(sum2 / n - mean * mean == doctest::Approx(dgp.variance(1, x0)).epsilon(2e-2));

    // Average effect Monte Carlo.
    double diff = 0.0;
    const int m = 1000000;
    for (int i = 0; i < m; ++i) {
        const std::vector<double> x = dgp.draw_context(rng);
        diff += dgp.draw_outcome(rng, 1, x) - dgp.draw_outcome(rng, 0, x);
    }
    CHECK(std::abs(diff / m - 0.1) < 0.001);
}

TEST_CASE("truncation-study design: fixed 0.4 effect and oracle variance") {
    const Dgp dgp(DgpConfig{DgpConfig::Kind::TruncationStudy, 0.1});
    CHECK(dgp.ate() == doctest::Approx(0.4));

    Rng rng(3, 0);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> x = dgp.draw_context(rng);
        CHECK(dgp.mean(1, x) - dgp.mean(0, x) == doctest::Approx(0.4).epsilon(1e-12));
        const double p1 = dgp.mean(1, x);
        CHECK(dgp.variance(1, x) == doctest::Approx(p1 * (1.0 - p1)).epsilon(1e-12));
        CHECK(p1 <= 1.0);
        CHECK(dgp.mean(0, x) >= 0.0);
    }
}
