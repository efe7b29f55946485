// Anytime-valid confidence sequences over the A2IPW score stream, on
// outcomes rescaled to [0,1] (so the effect lives in [-1,1]):
//
//   * HedgedCs  — grid of betting capital processes, one pair per candidate
//     theta'; the confidence set is where the mixed capital stays below
//     1/alpha.
//   * PrPiCs    — closed-form predictable plug-in empirical-Bernstein CS,
//     built from one test supermartingale per side (alpha/2 each).
//   * AsympCs   — normal-mixture boundary driven by the running variance.
//
// All three report running intersections (monotone endpoints) and treat
// times before t_min as unconstrained.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "avate/types.hpp"

namespace avate {

// psi_E(lambda) = -log(1-lambda) - lambda, for lambda in [0,1).
inline double psi_e(double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw std::logic_error("psi_e: lambda must lie in [0,1)");
    return -std::log1p(-lambda) - lambda;
}

// Predictable bet size min( sqrt( 2 log(2/alpha) / (sigma2_prev t log(1+t)) ), c ).
inline double lambda_prpi(std::int64_t t, double sigma2_prev, double alpha, double c) {
    const double raw =
        std::sqrt(2.0 * std::log(2.0 / alpha) /
                  (sigma2_prev * static_cast<double>(t) * std::log1p(static_cast<double>(t))));
    return std::min(raw, c);
}

// Raw normal-mixture interval; the caller owns intersection and clamping.
Interval asymp_interval(double mean, double sigma2, std::int64_t t, double rho, double alpha);

// Approximate width-minimising rho for a target sample size. The closed form
// is exact-to-one-fixed-point-iteration at unit variance; passing sigma2
// rescales the target to intrinsic time T*sigma2.
double rho_opt(double alpha, std::int64_t t_star, double sigma2 = 1.0);

struct ConfSeqOptions {
    double alpha = 0.05;
    std::int64_t t_min = 50;  // report the full parameter range before this time
};

// Intersection of all intervals seen so far. Width cannot grow; a crossing
// is kept as the canonical empty interval.
struct RunningIntersection {
    Interval current = Interval::unbounded();
    double prev_width = std::numeric_limits<double>::infinity();
    int width_violations = 0;

    Interval apply(const Interval& step) {
        current = intersect(current, step);
        const double w = current.width();
        if (w > prev_width * (1.0 + 1e-12)) ++width_violations;
        prev_width = w;
        return current;
    }
};

inline Interval running_intersect(RunningIntersection& state, const Interval& step) {
    return state.apply(step);
}

// ---------------------------------------------------------------------------
// Predictable plug-in empirical Bernstein CS.
//
// Lower side: xi_t = h_t/(k_t+1); upper side mirrors with xi_t = -h_t/(k_t+1).
// Each side keeps its own bet sizes (the one-sided cap on the running xi
// mean makes the two variance streams differ) and pays alpha/2 through the
// log(2/alpha) term of the displayed radius.
class PrPiCs {
public:
    explicit PrPiCs(ConfSeqOptions opt, double lambda_cap = 0.5, double sigma0_sq = 0.25);

    Interval update(double h, double k);

    Interval reported() const { return reported_; }
    // Per-t closed-form endpoints before clamping/intersection (used by the
    // supermartingale boundary checks).
    double raw_lower() const { return raw_lower_; }
    double raw_upper() const { return raw_upper_; }

    std::int64_t edge_clamp_count() const { return edge_clamps_; }
    int width_violations() const { return run_.width_violations; }
    std::int64_t count() const { return t_; }

private:
    struct Side {
        double sum_lambda_xi = 0.0;     // sum lambda_t xi_t
        double sum_lambda_scale = 0.0;  // sum lambda_t/(k_t+1)
        double sum_dev_psi = 0.0;       // sum (xi_t - xihat_{t-1})^2 psi_E(lambda_t)
        double sum_xi = 0.0;
        double sum_sq_dev = 0.0;        // sum (xi_i - xibar_i)^2, for Eq-style variance
    };

    void side_update(Side& s, double xi, double k, std::int64_t t);

    ConfSeqOptions opt_;
    double lambda_cap_;
    double sigma0_sq_;
    Side lower_;
    Side upper_;
    std::int64_t t_ = 0;
    std::int64_t edge_clamps_ = 0;
    double raw_lower_ = -std::numeric_limits<double>::infinity();
    double raw_upper_ = std::numeric_limits<double>::infinity();
    RunningIntersection run_;
    Interval reported_ = Interval::of(-1.0, 1.0);
};

// ---------------------------------------------------------------------------
// Hedged betting CS over a uniform grid on [-1,1].
//
// For each grid theta' two log-capitals accumulate factors 1 +/- lambda
// (h - theta'); the bet is clamped per process so both factors stay strictly
// positive for any |h| <= k (margin 1e-6 at the open boundary). The
// confidence set is where the even mixture stays below 1/alpha; endpoints
// are refined by one bisection step against the replayed capital so the
// reported interval conservatively covers the set with quantisation below
// half a grid cell.
class HedgedCs {
public:
    struct Options {
        double alpha = 0.05;
        std::int64_t t_min = 50;
        int grid_size = 1000;
        double mix = 0.5;        // weight on the K+ process
        double lambda_cap = 0.5;
        double margin = 1e-6;    // relative margin at the admissible-lambda boundary
        bool refine_endpoints = true;
    };

    explicit HedgedCs(Options opt);
    HedgedCs(ConfSeqOptions opt) : HedgedCs(Options{opt.alpha, opt.t_min, 1000, 0.5, 0.5, 1e-6, true}) {}

    Interval update(double h, double k);

    Interval reported() const { return reported_; }
    // log of the mixed capital at an arbitrary theta, replayed over the
    // observed stream (also used internally for endpoint refinement).
    double log_mixture_at(double theta) const;
    double lambda_at(std::int64_t step) const { return lam_hist_.at(step - 1); }

    std::int64_t count() const { return t_; }
    std::int64_t gap_events() const { return gap_events_; }
    bool ever_empty() const { return ever_empty_; }
    int width_violations() const { return run_.width_violations; }

private:
    double clamp_plus(double lambda, double k, double theta) const;
    double clamp_minus(double lambda, double k, double theta) const;

    Options opt_;
    std::vector<double> grid_;
    std::vector<double> log_kplus_;
    std::vector<double> log_kminus_;

    // Predictable bet statistics (priors 1/2 for the mean, 1/4 for the
    // variance).
    double sum_h_prev_ = 0.0;
    double sum_sq_dev_ = 0.0;

    std::vector<double> h_hist_;
    std::vector<double> k_hist_;
    std::vector<double> lam_hist_;

    std::int64_t t_ = 0;
    std::int64_t gap_events_ = 0;
    bool ever_empty_ = false;
    RunningIntersection run_;
    Interval reported_ = Interval::of(-1.0, 1.0);
};

// ---------------------------------------------------------------------------
// Asymptotic CS wrapper: consumes the running mean/variance of the score
// stream and intersects the normal-mixture interval over time.
class AsympCs {
public:
    AsympCs(ConfSeqOptions opt, double rho = 0.5);

    Interval update(std::int64_t t, double mean, double sigma2);

    Interval reported() const { return reported_; }
    int width_violations() const { return run_.width_violations; }

private:
    ConfSeqOptions opt_;
    double rho_;
    RunningIntersection run_;
    Interval reported_ = Interval::of(-1.0, 1.0);
};

}  // namespace avate
