// Monte Carlo reduction of per-iteration interval trajectories into
// cumulative miscoverage / cumulative power / mean width curves. The
// reduction is set-based: row order and iteration order do not matter.
#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "avate/experiment.hpp"

namespace avate {

struct AggregateResult {
    std::int64_t horizon = 0;
    std::int64_t n_iters = 0;
    std::array<bool, kMethodCount> present{};
    // Indexed by t-1, per method. Cumulative curves are non-decreasing.
    std::array<std::vector<double>, kMethodCount> cum_miscoverage;
    std::array<std::vector<double>, kMethodCount> cum_power;
    std::array<std::vector<double>, kMethodCount> mean_width;
};

class Aggregator {
public:
    // horizon 0: grow with the largest t seen (CSV ingestion path).
    explicit Aggregator(std::int64_t horizon = 0);

    // covered: 1 covered, 0 excluded, -1 unknown (no true value available).
    void add_row(std::uint64_t iter, std::int64_t t, int method, double width, int covered,
                 int rejects_zero);

    // Reduce a whole replication against the true effect (outcome units).
    void add(const IterationResult& result, double theta0);

    // Scopes subsequent rows to a new shard so iteration ids from different
    // trajectory files never collide.
    void begin_shard() { shard_ += 1; }

    AggregateResult finalize() const;

private:
    std::int64_t horizon_;
    std::uint64_t shard_ = 0;
    std::unordered_set<std::uint64_t> iters_;
    std::array<std::unordered_map<std::uint64_t, std::int64_t>, kMethodCount> first_miss_;
    std::array<std::unordered_map<std::uint64_t, std::int64_t>, kMethodCount> first_reject_;
    std::array<std::vector<double>, kMethodCount> width_sum_;
    std::array<std::vector<std::int64_t>, kMethodCount> width_count_;
    std::array<bool, kMethodCount> present_{};
};

}  // namespace avate
