// A2IPW score stream: per-step score, running mean/variance accumulators
// (compensated summation), and the fixed-time CLT confidence interval.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "avate/types.hpp"

namespace avate {

// Doubly-robust per-step score. With y and both predictions in [0,1] and
// pi1 in [1/k, 1-1/k], the score satisfies |h| <= k.
inline double a2ipw_score(double y, int a, double f1, double f0, double pi1) {
    if (!(pi1 > 0.0 && pi1 < 1.0)) throw std::logic_error("a2ipw_score: pi1 must lie in (0,1)");
    const double augment = f1 - f0;
    if (a == 1) return (y - f1) / pi1 + augment;
    return -(y - f0) / (1.0 - pi1) + augment;
}

struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

// Running estimate of the A2IPW mean and its variance (1/T normaliser).
class EstimatorState {
public:
    explicit EstimatorState(bool keep_history = false) : keep_history_(keep_history) {}

    void add(double h) {
        ++t_;
        sum_h_.add(h);
        sum_h2_.add(h * h);
    }
    void add(const ScoreRecord& rec) {
        add(rec.h);
        if (keep_history_) history_.push_back(rec);
    }

    std::int64_t count() const { return t_; }
    double mean() const { return t_ == 0 ? 0.0 : sum_h_.value() / static_cast<double>(t_); }
    double variance() const {
        if (t_ == 0) return 0.0;
        const double m = mean();
        const double v = sum_h2_.value() / static_cast<double>(t_) - m * m;
        return v > 0.0 ? v : 0.0;  // guard tiny negative drift
    }
    double stddev() const;

    const std::vector<ScoreRecord>& history() const { return history_; }

private:
    std::int64_t t_ = 0;
    KahanSum sum_h_;
    KahanSum sum_h2_;
    bool keep_history_ = false;
    std::vector<ScoreRecord> history_;
};

// Standard normal quantile, accurate to ~1e-15.
double normal_quantile(double p);

// mean +/- z_{1-alpha/2} * sd / sqrt(T). Empty optional while the interval is
// not yet constructible (fewer than two observations, or zero variance).
std::optional<Interval> clt_interval(const EstimatorState& state, double alpha);

}  // namespace avate
