#include "avate/aggregate.hpp"

#include <stdexcept>

namespace avate {

Aggregator::Aggregator(std::int64_t horizon) : horizon_(horizon) {
    if (horizon_ < 0) throw ConfigError("aggregate horizon must be >= 0");
    for (int m = 0; m < kMethodCount; ++m) {
        width_sum_[m].assign(horizon_, 0.0);
        width_count_[m].assign(horizon_, 0);
    }
}

void Aggregator::add_row(std::uint64_t iter, std::int64_t t, int method, double width, int covered,
                         int rejects_zero) {
    if (t < 1) throw DataError("trajectory row with t out of range: " + std::to_string(t));
    if (method < 0 || method >= kMethodCount) throw DataError("trajectory row with unknown method index");
    if (t > horizon_) {
        horizon_ = t;
        for (int m = 0; m < kMethodCount; ++m) {
            width_sum_[m].resize(horizon_, 0.0);
            width_count_[m].resize(horizon_, 0);
        }
    }

    // Shard-scoped iteration key (trajectory files may reuse iter ids).
    iter += shard_ << 40;
    iters_.insert(iter);
    present_[method] = true;
    width_sum_[method][t - 1] += width;
    width_count_[method][t - 1] += 1;

    if (covered == 0) {
        auto [it, fresh] = first_miss_[method].try_emplace(iter, t);
        if (!fresh && t < it->second) it->second = t;
    }
    if (rejects_zero == 1) {
        auto [it, fresh] = first_reject_[method].try_emplace(iter, t);
        if (!fresh && t < it->second) it->second = t;
    }
}

void Aggregator::add(const IterationResult& result, double theta0) {
    for (int m = 0; m < kMethodCount; ++m) {
        const std::vector<Interval>& ivs = result.intervals[m];
        for (std::size_t i = 0; i < ivs.size(); ++i) {
            const Interval& iv = ivs[i];
            add_row(result.iter, static_cast<std::int64_t>(i + 1), m, iv.width(),
                    iv.contains(theta0) ? 1 : 0, iv.contains(0.0) ? 0 : 1);
        }
    }
}

AggregateResult Aggregator::finalize() const {
    AggregateResult out;
    out.horizon = horizon_;
    out.n_iters = static_cast<std::int64_t>(iters_.size());
    out.present = present_;
    const double n = out.n_iters > 0 ? static_cast<double>(out.n_iters) : 1.0;

    for (int m = 0; m < kMethodCount; ++m) {
        if (!present_[m]) continue;
        std::vector<double> miss_hist(horizon_ + 1, 0.0);
        std::vector<double> reject_hist(horizon_ + 1, 0.0);
        for (const auto& [iter, t] : first_miss_[m]) miss_hist[t] += 1.0;
        for (const auto& [iter, t] : first_reject_[m]) reject_hist[t] += 1.0;

        auto& mis = out.cum_miscoverage[m];
        auto& pow = out.cum_power[m];
        auto& wid = out.mean_width[m];
        mis.resize(horizon_);
        pow.resize(horizon_);
        wid.resize(horizon_);

        double miss_acc = 0.0, reject_acc = 0.0;
        for (std::int64_t t = 1; t <= horizon_; ++t) {
            miss_acc += miss_hist[t];
            reject_acc += reject_hist[t];
            mis[t - 1] = miss_acc / n;
            pow[t - 1] = reject_acc / n;
            wid[t - 1] = width_count_[m][t - 1] > 0
                             ? width_sum_[m][t - 1] / static_cast<double>(width_count_[m][t - 1])
                             : 0.0;
        }
        // Cumulative curves cannot decrease.
        for (std::int64_t t = 1; t < horizon_; ++t) {
            if (mis[t] < mis[t - 1] || pow[t] < pow[t - 1]) {
                throw std::logic_error("aggregate: cumulative curve decreased");
            }
        }
    }
    return out;
}

}  // namespace avate
