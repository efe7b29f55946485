#include "avate/confseq.hpp"

#include <algorithm>
#include <cmath>

namespace avate {

namespace {

// Parameter space for rescaled effects.
const Interval kParamRange = Interval::of(-1.0, 1.0);
// Canonical empty interval: parameter-space bounds crossed.
const Interval kEmpty = Interval{1.0, -1.0};

}  // namespace

Interval asymp_interval(double mean, double sigma2, std::int64_t t, double rho, double alpha) {
    if (t < 1) throw std::logic_error("asymp_interval: t must be >= 1");
    if (!(sigma2 >= 0.0)) throw std::logic_error("asymp_interval: sigma2 must be >= 0");
    if (!(rho > 0.0)) throw std::logic_error("asymp_interval: rho must be > 0");
    const double tt = static_cast<double>(t);
    const double a = tt * sigma2 * rho * rho + 1.0;
    const double radius = std::sqrt(2.0 * a / (tt * tt * rho * rho) * std::log(std::sqrt(a) / alpha));
    return Interval{mean - radius, mean + radius};
}

double rho_opt(double alpha, std::int64_t t_star, double sigma2) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::logic_error("rho_opt: alpha must lie in (0,1)");
    if (t_star < 1) throw std::logic_error("rho_opt: t_star must be >= 1");
    if (!(sigma2 > 0.0)) throw std::logic_error("rho_opt: sigma2 must be > 0");
    const double l = -2.0 * std::log(alpha);
    return std::sqrt((l + std::log(l + 1.0)) / (static_cast<double>(t_star) * sigma2));
}

// ---------------------------------------------------------------------------
// PrPiCs

PrPiCs::PrPiCs(ConfSeqOptions opt, double lambda_cap, double sigma0_sq)
    : opt_(opt), lambda_cap_(lambda_cap), sigma0_sq_(sigma0_sq) {
    if (!(opt_.alpha > 0.0 && opt_.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (!(lambda_cap_ > 0.0 && lambda_cap_ < 1.0)) throw ConfigError("lambda cap must lie in (0,1)");
}

void PrPiCs::side_update(Side& s, double xi, double k, std::int64_t t) {
    const double scale = 1.0 / (k + 1.0);

    // sigma2 estimate over steps 1..t-1 (prior-seeded), Eq.-style divisor t.
    const double sigma2_prev = (sigma0_sq_ + s.sum_sq_dev) / static_cast<double>(t);
    const double lambda = lambda_prpi(t, sigma2_prev, opt_.alpha, lambda_cap_);

    // Capped predictable mean of xi; the cap uses the current k_t.
    const double xihat_prev =
        t == 1 ? 0.0 : std::min(s.sum_xi / static_cast<double>(t - 1), scale);
    double dev = xi - xihat_prev;
    if (dev <= -1.0) {  // only reachable at the exact h = -k edge
        dev = -1.0 + 1e-9;
        ++edge_clamps_;
    }

    s.sum_lambda_xi += lambda * xi;
    s.sum_lambda_scale += lambda * scale;
    s.sum_dev_psi += dev * dev * psi_e(lambda);

    // Non-predictable running mean (current observation included) feeding the
    // variance stream for the next step's bet.
    const double xibar = std::min((s.sum_xi + xi) / static_cast<double>(t), scale);
    const double d = xi - xibar;
    s.sum_sq_dev += d * d;
    s.sum_xi += xi;
}

Interval PrPiCs::update(double h, double k) {
    ++t_;
    const double xi = h / (k + 1.0);
    side_update(lower_, xi, k, t_);
    side_update(upper_, -xi, k, t_);

    const double budget = std::log(2.0 / opt_.alpha);
    raw_lower_ = (lower_.sum_lambda_xi - lower_.sum_dev_psi - budget) / lower_.sum_lambda_scale;
    raw_upper_ = -(upper_.sum_lambda_xi - upper_.sum_dev_psi - budget) / upper_.sum_lambda_scale;

    if (t_ < opt_.t_min) {
        reported_ = kParamRange;
        return reported_;
    }
    Interval step = intersect(Interval{raw_lower_, raw_upper_}, kParamRange);
    if (step.empty()) step = kEmpty;
    reported_ = run_.apply(step);
    if (reported_.empty()) reported_ = kEmpty;
    return reported_;
}

// ---------------------------------------------------------------------------
// HedgedCs

HedgedCs::HedgedCs(Options opt) : opt_(opt) {
    if (!(opt_.alpha > 0.0 && opt_.alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (opt_.grid_size < 2) throw ConfigError("hedged grid size must be >= 2");
    if (!(opt_.mix >= 0.0 && opt_.mix <= 1.0)) throw ConfigError("hedged mix must lie in [0,1]");
    grid_.resize(opt_.grid_size);
    for (int j = 0; j < opt_.grid_size; ++j) {
        grid_[j] = -1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(opt_.grid_size - 1);
    }
    log_kplus_.assign(grid_.size(), 0.0);
    log_kminus_.assign(grid_.size(), 0.0);
}

// Admissible bets keep every capital factor strictly positive for |h| <= k:
// the K+ factor needs lambda < 1/(k+theta'), the K- factor (a bet with the
// opposite sign) needs lambda < 1/(k-theta').
double HedgedCs::clamp_plus(double lambda, double k, double theta) const {
    return std::min(lambda, (1.0 - opt_.margin) / (k + theta));
}
double HedgedCs::clamp_minus(double lambda, double k, double theta) const {
    return std::min(lambda, (1.0 - opt_.margin) / (k - theta));
}

namespace {
inline double log_mix(double m, double log_a, double log_b) {
    const double hi = std::max(log_a, log_b);
    return hi + std::log(m * std::exp(log_a - hi) + (1.0 - m) * std::exp(log_b - hi));
}
}  // namespace

double HedgedCs::log_mixture_at(double theta) const {
    double lp = 0.0, lm = 0.0;
    for (std::size_t i = 0; i < h_hist_.size(); ++i) {
        const double h = h_hist_[i];
        const double k = k_hist_[i];
        const double lam = lam_hist_[i];
        lp += std::log1p(clamp_plus(lam, k, theta) * (h - theta));
        lm += std::log1p(-clamp_minus(lam, k, theta) * (h - theta));
    }
    return log_mix(opt_.mix, lp, lm);
}

Interval HedgedCs::update(double h, double k) {
    ++t_;

    const double sigma2_prev =
        t_ == 1 ? 0.25 : (0.25 + sum_sq_dev_) / static_cast<double>(t_ - 1);
    const double lam = lambda_prpi(t_, sigma2_prev, opt_.alpha, opt_.lambda_cap);

    const double theta_hat = (0.5 + sum_h_prev_) / static_cast<double>(t_);
    const double dev = h - theta_hat;
    sum_sq_dev_ += dev * dev;
    sum_h_prev_ += h;

    h_hist_.push_back(h);
    k_hist_.push_back(k);
    lam_hist_.push_back(lam);

    const double threshold = -std::log(opt_.alpha);
    int j_lo = -1, j_hi = -1, included = 0;
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        const double theta = grid_[j];
        log_kplus_[j] += std::log1p(clamp_plus(lam, k, theta) * (h - theta));
        log_kminus_[j] += std::log1p(-clamp_minus(lam, k, theta) * (h - theta));
        if (log_mix(opt_.mix, log_kplus_[j], log_kminus_[j]) < threshold) {
            if (j_lo < 0) j_lo = static_cast<int>(j);
            j_hi = static_cast<int>(j);
            ++included;
        }
    }

    if (t_ < opt_.t_min) {
        reported_ = kParamRange;
        return reported_;
    }

    Interval step;
    if (included == 0) {
        ever_empty_ = true;
        step = kEmpty;
    } else {
        // Interval-ness of the confidence set is empirical; log any gap.
        if (included != j_hi - j_lo + 1) ++gap_events_;

        double lo = grid_[j_lo];
        double hi = grid_[j_hi];
        if (opt_.refine_endpoints) {
            // One bisection per endpoint. Report the tightest point known to
            // be excluded, so the interval conservatively contains the set
            // and the quantisation error drops below half a grid cell.
            if (j_lo > 0) {
                const double mid = 0.5 * (grid_[j_lo - 1] + grid_[j_lo]);
                lo = log_mixture_at(mid) < threshold ? grid_[j_lo - 1] : mid;
            }
            if (j_hi + 1 < static_cast<int>(grid_.size())) {
                const double mid = 0.5 * (grid_[j_hi] + grid_[j_hi + 1]);
                hi = log_mixture_at(mid) < threshold ? grid_[j_hi + 1] : mid;
            }
        }
        step = Interval{lo, hi};
    }

    reported_ = run_.apply(step);
    if (reported_.empty()) reported_ = kEmpty;
    return reported_;
}

// ---------------------------------------------------------------------------
// AsympCs

AsympCs::AsympCs(ConfSeqOptions opt, double rho) : opt_(opt), rho_(rho) {
    if (!(rho_ > 0.0)) throw ConfigError("asymp rho must be > 0");
}

Interval AsympCs::update(std::int64_t t, double mean, double sigma2) {
    if (t < opt_.t_min) {
        reported_ = kParamRange;
        return reported_;
    }
    const Interval raw = asymp_interval(mean, sigma2, t, rho_, opt_.alpha);
    reported_ = run_.apply(intersect(raw, kParamRange));
    if (reported_.empty()) reported_ = kEmpty;
    return reported_;
}

}  // namespace avate
