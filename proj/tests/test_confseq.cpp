#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "avate/confseq.hpp"
#include "avate/dgp.hpp"
#include "avate/estimator.hpp"
#include "avate/rng.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace avate;

TEST_CASE("psi_e values and shape") {
    CHECK(psi_e(0.0) == 0.0);
    CHECK(psi_e(0.5) == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-12));  // ~0.193147
    CHECK_THROWS_AS(psi_e(1.0), std::logic_error);
    CHECK_THROWS_AS(psi_e(-0.1), std::logic_error);

    // Increasing and convex on [0, 0.9] by finite differences.
    double prev = psi_e(0.0), prev_diff = 0.0;
    for (int i = 1; i <= 90; ++i) {
        const double v = psi_e(0.9 * i / 90.0);
        const double diff = v - prev;
        CHECK(diff >= 0.0);
        if (i > 1) CHECK(diff >= prev_diff - 1e-15);
        prev = v;
        prev_diff = diff;
    }
}

TEST_CASE("predictable bet size") {
    // Small t with the prior variance: the raw value exceeds the cap.
    CHECK(lambda_prpi(1, 0.25, 0.05, 0.5) == 0.5);
    // Hand arithmetic at t = 10^4.
    CHECK(lambda_prpi(10000, 0.25, 0.05, 0.5) == doctest::Approx(0.0179).epsilon(2e-3));
    // Monotone decreasing past the cap.
    double prev = 1.0;
    for (std::int64_t t = 1; t <= 100000; t *= 10) {
        const double l = lambda_prpi(t, 0.25, 0.05, 0.5);
        CHECK(l <= prev);
        prev = l;
    }
}

TEST_CASE("prpi: first step is symmetric about zero") {
    PrPiCs cs(ConfSeqOptions{0.05, 1});
    cs.update(0.0, 2.0);
    CHECK(cs.raw_lower() == doctest::Approx(-cs.raw_upper()).epsilon(1e-12));
    CHECK(std::isfinite(cs.raw_lower()));
    const Interval rep = cs.reported();
    CHECK(rep.lower == doctest::Approx(-rep.upper));
}

TEST_CASE("prpi: width shrinks on an iid bounded stream") {
    PrPiCs cs(ConfSeqOptions{0.05, 1});
    Rng rng(5, 0);
    double width_500 = 0.0, width_5000 = 0.0;
    for (std::int64_t t = 1; t <= 5000; ++t) {
        const double h = rng.bernoulli(0.4) ? 1.0 : 0.0;
        const Interval rep = cs.update(h, 2.0);
        if (t == 500) width_500 = rep.width();
        if (t == 5000) width_5000 = rep.width();
    }
    CHECK(width_5000 < width_500);
    CHECK(cs.width_violations() == 0);
}

TEST_CASE("prpi: endpoints sit on the supermartingale boundary") {
    // Raw closed-form endpoints, replayed through an independent evaluation
    // of the test supermartingale, must hit the 2/alpha threshold.
    Rng rng(6, 0);
    const double alpha = 0.05;
    for (int rep = 0; rep < 20; ++rep) {
        const std::int64_t horizon = 100 + static_cast<std::int64_t>(rng.uniform() * 300);
        const bool geometric = rng.bernoulli(0.5);
        const double k1 = rng.uniform(2.0, 8.0);
        std::vector<double> hs, ks;
        PrPiCs cs(ConfSeqOptions{alpha, 1});
        for (std::int64_t t = 1; t <= horizon; ++t) {
            const double k = geometric ? k1 / std::pow(0.999, double(t - 1)) : k1;
            const double h = rng.uniform(-k, k);
            hs.push_back(h);
            ks.push_back(k);
            cs.update(h, k);
        }
        const double target = std::log(2.0 / alpha);
        const double log_m_lower =
            oracle::log_eb_supermartingale(hs, ks, cs.raw_lower(), alpha, /*mirrored=*/false);
        const double log_m_upper =
            oracle::log_eb_supermartingale(hs, ks, cs.raw_upper(), alpha, /*mirrored=*/true);
        CHECK(std::abs(std::exp(log_m_lower - target) - 1.0) <= 1e-6);
        CHECK(std::abs(std::exp(log_m_upper - target) - 1.0) <= 1e-6);
    }
}

TEST_CASE("prpi: exact k-edge deviation is clamped and counted") {
    PrPiCs cs(ConfSeqOptions{0.05, 1});
    const double k = 2.0;
    cs.update(k, k);  // pushes the running xi mean to its cap
    CHECK(cs.edge_clamp_count() == 0);
    cs.update(-k, k);  // xi - xihat = -1 exactly
    CHECK(cs.edge_clamp_count() == 1);
    CHECK(std::isfinite(cs.raw_lower()));
    CHECK(std::isfinite(cs.raw_upper()));
}

TEST_CASE("hedged: no evidence means the full parameter range") {
    HedgedCs cs(ConfSeqOptions{0.05, 1});
    CHECK(cs.reported().lower == -1.0);
    CHECK(cs.reported().upper == 1.0);
}

TEST_CASE("hedged: constant stream concentrates on its value and never drops it") {
    HedgedCs::Options opt;
    opt.t_min = 1;
    HedgedCs cs(opt);
    const double target = 0.3;
    Interval rep;
    bool always_contained = true;
    for (std::int64_t t = 1; t <= 5000; ++t) {
        rep = cs.update(target, 2.0);
        always_contained = always_contained && rep.contains(target);
    }
    CHECK(always_contained);
    CHECK(rep.width() < 0.5);
    // The capital at the true constant stays at its initial fair value, so
    // the mixture never crosses 1/alpha there.
    CHECK(cs.log_mixture_at(target) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cs.gap_events() == 0);
    CHECK(cs.width_violations() == 0);
}

TEST_CASE("hedged: capitals stay finite at extreme scores and grid edges") {
    HedgedCs::Options opt;
    opt.t_min = 1;
    HedgedCs cs(opt);
    Rng rng(7, 0);
    double k = 2.0;
    for (std::int64_t t = 1; t <= 200; ++t) {
        // Adversarial stream hugging the score bound.
        const double h = rng.bernoulli(0.5) ? k : -k;
        cs.update(h, k);
        k /= 0.999;
    }
    for (double theta : {-1.0, -0.999, -0.3, 0.0, 0.7, 1.0}) {
        CHECK(std::isfinite(cs.log_mixture_at(theta)));
    }
    CHECK(!cs.reported().empty());
}

TEST_CASE("hedged: one-step capital ratio is a fair game at the true effect") {
    const Dgp dgp(DgpConfig{DgpConfig::Kind::Bernoulli, 0.1});
    const double theta0 = dgp.ate();
    const double k = 2.002, lambda = 0.31, pi1 = 0.5;
    const double margin = 1e-6;
    // Unequal accumulated capitals keep the mixture ratio non-degenerate.
    const double cap_plus = 1.3, cap_minus = 0.8;
    Rng rng(8, 0);
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::vector<double> x = dgp.draw_context(rng);
        const int a = rng.bernoulli(pi1) ? 1 : 0;
        const double y = dgp.draw_outcome(rng, a, x);
        const double h = a2ipw_score(y, a, dgp.mean(1, x), dgp.mean(0, x), pi1);
        const double lp = std::min(lambda, (1.0 - margin) / (k + theta0));
        const double lm = std::min(lambda, (1.0 - margin) / (k - theta0));
        const double ratio = (cap_plus * (1.0 + lp * (h - theta0)) +
                              cap_minus * (1.0 - lm * (h - theta0))) /
                             (cap_plus + cap_minus);
        sum += ratio;
        sum2 += ratio * ratio;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(se > 0.0);
    CHECK(std::abs(mean - 1.0) <= 3.0 * se);
}

TEST_CASE("asymp interval: spot value and shape") {
    // sigma2=0.25, rho=0.5, T=1000, alpha=0.05.
    const Interval iv = asymp_interval(0.0, 0.25, 1000, 0.5, 0.05);
    CHECK(iv.upper == doctest::Approx(0.0507566).epsilon(1e-4));
    CHECK(iv.lower == doctest::Approx(-iv.upper));

    // Radius decreases in T across [100, 10^4].
    double prev = asymp_interval(0.0, 0.25, 100, 0.5, 0.05).upper;
    for (std::int64_t t = 200; t <= 10000; t += 100) {
        const double r = asymp_interval(0.0, 0.25, t, 0.5, 0.05).upper;
        CHECK(r < prev);
        prev = r;
    }

    // Larger alpha shrinks the radius.
    double prev_alpha = asymp_interval(0.0, 0.25, 1000, 0.5, 0.01).upper;
    for (double alpha : {0.05, 0.1, 0.3, 0.6, 0.9}) {
        const double r = asymp_interval(0.0, 0.25, 1000, 0.5, alpha).upper;
        CHECK(r < prev_alpha);
        prev_alpha = r;
    }
}

TEST_CASE("rho_opt: closed form and scaling") {
    CHECK(rho_opt(0.05, 100) == doctest::Approx(0.2817120).epsilon(1e-5));
    CHECK(rho_opt(0.05, 400) == doctest::Approx(rho_opt(0.05, 100) / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(rho_opt(1.5, 100), std::logic_error);
}

TEST_CASE("rho_opt agrees with the brute-force grid minimiser") {
    for (std::int64_t t : {50, 100, 1000, 5000}) {
        for (double sigma2 : {0.05, 0.25}) {
            const double approx = rho_opt(0.05, t, sigma2);
            const double exact = oracle::grid_min_rho(0.05, t, sigma2);
            CHECK(std::abs(approx - exact) / exact <= 0.05);
        }
    }
}

TEST_CASE("running intersection") {
    RunningIntersection run;
    Interval cur = run.apply(Interval::unbounded());
    CHECK(cur.lower == -std::numeric_limits<double>::infinity());
    cur = run.apply(Interval::of(0.0, 1.0));
    CHECK(cur.lower == 0.0);
    CHECK(cur.upper == 1.0);
    cur = run.apply(Interval::of(0.2, 1.5));
    CHECK(cur.lower == doctest::Approx(0.2));
    CHECK(cur.upper == doctest::Approx(1.0));

    // Widths never grow under arbitrary further intervals.
    Rng rng(9, 0);
    double prev_width = cur.width();
    for (int i = 0; i < 500; ++i) {
        const double lo = rng.uniform(-1.0, 1.0);
        cur = run.apply(Interval::of(lo, lo + rng.uniform(0.0, 2.0)));
        CHECK(cur.width() <= prev_width + 1e-15);
        prev_width = cur.width();
    }
    CHECK(run.width_violations == 0);
}

TEST_CASE("asymp cs: reporting starts at t_min and stays monotone") {
    AsympCs cs(ConfSeqOptions{0.05, 50}, 0.5);
    EstimatorState est;
    Rng rng(10, 0);
    double prev_width = 2.0;
    for (std::int64_t t = 1; t <= 500; ++t) {
        est.add(rng.uniform());
        const Interval rep = cs.update(t, est.mean(), est.variance());
        if (t < 50) {
            CHECK(rep.lower == -1.0);
            CHECK(rep.upper == 1.0);
        } else {
            CHECK(rep.width() <= prev_width + 1e-15);
            prev_width = rep.width();
        }
    }
    CHECK(cs.width_violations() == 0);
}

TEST_CASE("hedged: gating before t_min reports the full range") {
    HedgedCs cs(ConfSeqOptions{0.05, 50});
    Rng rng(11, 0);
    for (std::int64_t t = 1; t <= 49; ++t) {
        const Interval rep = cs.update(rng.uniform(-1.0, 1.0), 2.0);
        CHECK(rep.lower == -1.0);
        CHECK(rep.upper == 1.0);
    }
    const Interval first = cs.update(0.0, 2.0);
    CHECK(first.width() < 2.0);
}
