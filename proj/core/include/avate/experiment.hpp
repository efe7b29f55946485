// The experiment loop: policy -> assignment -> outcome -> score -> interval
// updates, plus the Monte Carlo driver that runs independent replications on
// a thread pool with per-iteration RNG streams.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avate/confseq.hpp"
#include "avate/dgp.hpp"
#include "avate/estimator.hpp"
#include "avate/policy.hpp"
#include "avate/regression.hpp"
#include "avate/rng.hpp"
#include "avate/types.hpp"

namespace avate {

enum class Method : int { Clt = 0, Hedged = 1, Prpi = 2, Asymp = 3 };
inline constexpr int kMethodCount = 4;
inline constexpr const char* kMethodNames[kMethodCount] = {"clt", "hedged", "prpi", "asymp"};

struct MethodSet {
    std::array<bool, kMethodCount> enabled{true, true, true, true};

    bool has(Method m) const { return enabled[static_cast<int>(m)]; }
    void set(Method m, bool on) { enabled[static_cast<int>(m)] = on; }
    static MethodSet none() { return MethodSet{{false, false, false, false}}; }
    static MethodSet parse(const std::vector<std::string>& names);
};

struct ExperimentConfig {
    // Absent for replay-only configs (externally collected streams).
    std::optional<DgpConfig> dgp = DgpConfig{};
    std::int64_t horizon = 5000;  // T
    std::int64_t n_iters = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 20240801;
    std::int64_t t_min = 50;
    MethodSet methods;
    PolicyConfig policy;
    RegressionConfig model;

    double rho = 0.5;        // AsympCs tuning
    int hedged_grid = 1000;  // grid points on [-1,1]
    double lambda_cap = 0.5;

    // Declared outcome bounds; defaults to the DGP-implied range.
    std::optional<OutcomeRange> outcome_range;
    // simulate: write per-iteration stream/score CSVs for the first N iters.
    std::int64_t emit_streams = 0;

    const DgpConfig& dgp_or_throw() const;
    OutcomeRange resolved_range() const;
    // True effect in outcome units; NaN when no DGP is configured.
    double true_effect() const;
    void validate() const;
};

// One replication's full record. Scores are in rescaled [0,1]-outcome units;
// intervals are mapped back to outcome units.
struct IterationResult {
    std::uint64_t iter = 0;
    std::vector<ScoreRecord> scores;
    std::array<std::vector<Interval>, kMethodCount> intervals;

    // Raw stream (kept only when requested; feeds the stream CSV).
    std::vector<std::vector<double>> contexts;
    std::vector<int> arms;
    std::vector<double> outcomes;

    int width_violations = 0;
    std::int64_t hedged_gap_events = 0;
    bool hedged_ever_empty = false;
    std::int64_t prpi_edge_clamps = 0;
};

// Scoring pipeline shared by simulation and replay: fold assignment,
// cross-fold prediction, A2IPW scoring and every enabled confidence-sequence
// update. The caller supplies (a, y, pi1, k) per step, either from a policy
// plus DGP or from a recorded stream.
class ScoringEngine {
public:
    ScoringEngine(const ExperimentConfig& cfg, std::uint64_t iter_id, Rng fold_rng, int dim);

    // Policy decision for step t (before the subject is assigned to a fold).
    PolicyDecision decide(const std::vector<double>& x, std::int64_t t);

    // Advance one step; y is in outcome units.
    void step(std::int64_t t, const std::vector<double>& x, int a, double y, double pi1, double k);

    const EstimatorState& estimator() const { return estimator_; }
    IterationResult finish();

    double k_at(std::int64_t t) const { return policy_.config().schedule.k_at(t); }

private:
    Interval to_outcome_units(const Interval& unit_interval) const;

    ExperimentConfig cfg_;
    OutcomeRange range_;
    std::unique_ptr<Dgp> oracle_dgp_;  // only for oracle-aipw policies
    OracleVariance oracle_v_;
    Policy policy_;
    SplitRegressor regressor_;
    Rng fold_rng_;
    EstimatorState estimator_;

    std::optional<HedgedCs> hedged_;
    std::optional<PrPiCs> prpi_;
    std::optional<AsympCs> asymp_;

    IterationResult result_;
    bool keep_stream_ = false;

public:
    void set_keep_stream(bool keep) { keep_stream_ = keep; }
};

// Run one full simulated replication. Deterministic in (cfg.seed, iter_id).
IterationResult run_experiment(const ExperimentConfig& cfg, std::uint64_t iter_id,
                               bool keep_stream = false);

// Runs iterations 0..cfg.n_iters-1 across `threads` workers (<=0: hardware
// concurrency) and hands each result to `consume` in iteration order.
void run_monte_carlo(const ExperimentConfig& cfg, int threads,
                     const std::function<void(IterationResult&&)>& consume);

}  // namespace avate
