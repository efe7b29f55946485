// CSV interfaces: trajectory and aggregate reports (12 significant digits,
// stable across reruns), score logs, and the stream format consumed by
// `infer` (full 17-digit precision so replays are bit-exact).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "avate/aggregate.hpp"
#include "avate/experiment.hpp"

namespace avate::csv {

std::string format_report(double v);  // %.12g
std::string format_exact(double v);   // %.17g, round-trips doubles

// trajectory: iter,t,method,lower,upper,width,covered,rejects_zero,h,pi1,k
class TrajectoryWriter {
public:
    explicit TrajectoryWriter(const std::string& path);
    ~TrajectoryWriter();

    // theta0 in outcome units; pass NaN when the true effect is unknown
    // (covered column becomes -1).
    void write(const IterationResult& result, double theta0);
    void flush();

private:
    struct Impl;
    Impl* impl_;
};

void write_aggregate(const std::string& path, const AggregateResult& agg);

// scores: t,h,pi1,k,f1_hat,f0_hat
void write_scores(const std::string& path, const std::vector<ScoreRecord>& scores);

// stream: t,x1..xd,a,y,pi1,k
void write_stream(const std::string& path, const IterationResult& result,
                  const std::vector<ScoreRecord>& scores);

struct StreamRow {
    std::int64_t t = 0;
    std::vector<double> x;
    int a = 0;
    double y = 0.0;
    double pi1 = 0.0;
    double k = 0.0;
};

// Parses and validates a stream file: consecutive t starting at 1, arms in
// {0,1}, k >= 2 and pi1 within [1/k, 1-1/k] (tiny parse tolerance). Errors
// cite the offending row.
std::vector<StreamRow> read_stream(const std::string& path);

// Streams trajectory rows from a report CSV into an aggregator.
void read_trajectory_into(const std::string& path, Aggregator& agg);

}  // namespace avate::csv
