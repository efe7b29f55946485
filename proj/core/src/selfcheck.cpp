#include "avate/selfcheck.hpp"

#include <cmath>
#include <sstream>

#include "avate/confseq.hpp"
#include "avate/dgp.hpp"
#include "avate/estimator.hpp"
#include "avate/policy.hpp"
#include "avate/rng.hpp"

namespace avate {

namespace {

SelfcheckReport::Item check_score_bound(std::uint64_t seed) {
    Rng rng(seed, 1001);
    const int n = 100000;
    int violations = 0;
    for (int i = 0; i < n; ++i) {
        const double k = rng.uniform(2.0, 100.0);
        const double pi1 = rng.uniform(1.0 / k, 1.0 - 1.0 / k);
        const double y = rng.uniform();
        const double f1 = rng.uniform();
        const double f0 = rng.uniform();
        const int a = rng.bernoulli(0.5) ? 1 : 0;
        const double h = a2ipw_score(y, a, f1, f0, pi1);
        if (std::abs(h) > k) ++violations;
    }
    std::ostringstream detail;
    detail << violations << " violations of |h| <= k in " << n << " draws";
    return {"score_bound", violations == 0, detail.str()};
}

SelfcheckReport::Item check_psi_values(double bias) {
    auto psi_biased = [bias](double lambda) { return psi_e(lambda) + bias; };
    bool ok = true;
    std::ostringstream detail;

    if (std::abs(psi_biased(0.0)) > 1e-12) ok = false;
    const double expect_half = std::log(2.0) - 0.5;
    if (std::abs(psi_biased(0.5) - expect_half) > 1e-12) ok = false;

    // Increasing and convex on [0, 0.9] by finite differences.
    const int n = 90;
    double prev = psi_biased(0.0), prev_diff = 0.0;
    for (int i = 1; i <= n && ok; ++i) {
        const double v = psi_biased(0.9 * i / n);
        const double diff = v - prev;
        if (diff < 0.0) ok = false;
        if (i > 1 && diff + 1e-15 < prev_diff) ok = false;
        prev = v;
        prev_diff = diff;
    }
    detail << "psi_E(0)=" << psi_biased(0.0) << ", psi_E(0.5)-expected=" << psi_biased(0.5) - expect_half;
    return {"psi_e_values", ok, detail.str()};
}

double grid_min_rho(double alpha, std::int64_t t, double sigma2) {
    double best_rho = 0.0;
    double best = std::numeric_limits<double>::infinity();
    const int n = 4000;
    for (int i = 0; i <= n; ++i) {
        const double rho = 1e-3 * std::pow(1e4, static_cast<double>(i) / n);  // 1e-3 .. 10
        const double radius = asymp_interval(0.0, sigma2, t, rho, alpha).upper;
        if (radius < best) {
            best = radius;
            best_rho = rho;
        }
    }
    return best_rho;
}

SelfcheckReport::Item check_rho_opt() {
    bool ok = true;
    std::ostringstream detail;
    for (std::int64_t t : {50, 100, 1000, 5000}) {
        for (double sigma2 : {0.05, 0.25}) {
            const double approx = rho_opt(0.05, t, sigma2);
            const double exact = grid_min_rho(0.05, t, sigma2);
            const double rel = std::abs(approx - exact) / exact;
            if (rel > 0.05) {
                ok = false;
                detail << "T=" << t << " sigma2=" << sigma2 << " rel=" << rel << "; ";
            }
        }
    }
    if (ok) detail << "all within 5% of the grid minimiser";
    return {"rho_opt_vs_grid", ok, detail.str()};
}

// One-step capital checks on the Bernoulli design with oracle regression:
// the hedged mixture is a fair game at the true effect, and the
// empirical-Bernstein process is a supermartingale.
SelfcheckReport::Item check_martingale_step(std::uint64_t seed) {
    const Dgp dgp(DgpConfig{DgpConfig::Kind::Bernoulli, 0.1});
    const double theta0 = dgp.ate();
    const double k = 2.002;
    const double lambda = 0.3;
    const double pi1 = 0.5;
    const double wplus = 1.2, wminus = 0.8;  // arbitrary positive history capital

    Rng rng(seed, 2002);
    const int n = 20000;
    double sum_ratio = 0.0, sum_ratio2 = 0.0;
    double sum_eb = 0.0, sum_eb2 = 0.0;
    const double xihat = 0.02;
    for (int i = 0; i < n; ++i) {
        const std::vector<double> x = dgp.draw_context(rng);
        const int a = rng.bernoulli(pi1) ? 1 : 0;
        const double y = dgp.draw_outcome(rng, a, x);
        const double h = a2ipw_score(y, a, dgp.mean(1, x), dgp.mean(0, x), pi1);

        const double lp = std::min(lambda, (1.0 - 1e-6) / (k + theta0));
        const double lm = std::min(lambda, (1.0 - 1e-6) / (k - theta0));
        const double ratio =
            (wplus * (1.0 + lp * (h - theta0)) + wminus * (1.0 - lm * (h - theta0))) / (wplus + wminus);
        sum_ratio += ratio;
        sum_ratio2 += ratio * ratio;

        const double xi = h / (k + 1.0);
        const double dev = xi - xihat;
        const double eb = std::exp(lambda * (xi - theta0 / (k + 1.0)) - dev * dev * psi_e(lambda));
        sum_eb += eb;
        sum_eb2 += eb * eb;
    }
    const double mean_ratio = sum_ratio / n;
    const double se_ratio = std::sqrt((sum_ratio2 / n - mean_ratio * mean_ratio) / n);
    const double mean_eb = sum_eb / n;
    const double se_eb = std::sqrt((sum_eb2 / n - mean_eb * mean_eb) / n);

    const bool fair = std::abs(mean_ratio - 1.0) <= 3.0 * se_ratio;
    const bool super = mean_eb <= 1.0 + 3.0 * se_eb;
    std::ostringstream detail;
    detail << "hedged ratio mean=" << mean_ratio << " (se " << se_ratio << "), eb mean=" << mean_eb
           << " (se " << se_eb << ")";
    return {"martingale_one_step", fair && super, detail.str()};
}

}  // namespace

SelfcheckReport run_selfcheck(const SelfcheckOptions& options) {
    SelfcheckReport report;
    report.items.push_back(check_score_bound(options.seed));
    report.items.push_back(check_psi_values(options.psi_bias));
    report.items.push_back(check_rho_opt());
    report.items.push_back(check_martingale_step(options.seed));
    return report;
}

}  // namespace avate
