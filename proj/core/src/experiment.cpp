#include "avate/experiment.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace avate {

MethodSet MethodSet::parse(const std::vector<std::string>& names) {
    MethodSet set = MethodSet::none();
    for (const std::string& name : names) {
        bool found = false;
        for (int m = 0; m < kMethodCount; ++m) {
            if (name == kMethodNames[m]) {
                set.enabled[m] = true;
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError("unknown method '" + name + "' (expected clt|hedged|prpi|asymp)");
    }
    return set;
}

const DgpConfig& ExperimentConfig::dgp_or_throw() const {
    if (!dgp) throw ConfigError("config is missing the 'dgp' key");
    return *dgp;
}

OutcomeRange ExperimentConfig::resolved_range() const {
    if (outcome_range) return *outcome_range;
    if (!dgp) throw ConfigError("config needs 'outcome_range' when no 'dgp' is given");
    return Dgp(*dgp).range();
}

double ExperimentConfig::true_effect() const {
    return dgp ? Dgp(*dgp).ate() : std::numeric_limits<double>::quiet_NaN();
}

void ExperimentConfig::validate() const {
    if (dgp) dgp->validate();
    if (policy.kind == PolicyConfig::Kind::OracleAipw && !dgp) {
        throw ConfigError("policy.kind oracle_aipw requires a dgp");
    }
    policy.validate();
    model.validate();
    if (horizon < 1) throw ConfigError("T must be >= 1");
    if (n_iters < 1) throw ConfigError("n_iters must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
    if (t_min < 1) throw ConfigError("t_min must be >= 1");
    if (!(rho > 0.0)) throw ConfigError("confseq.rho must be > 0");
    if (hedged_grid < 2) throw ConfigError("confseq.grid_size must be >= 2");
    if (!(lambda_cap > 0.0 && lambda_cap < 1.0)) throw ConfigError("confseq.lambda_cap must lie in (0,1)");
    if (emit_streams < 0) throw ConfigError("emit_streams must be >= 0");
    if (outcome_range && !(outcome_range->lo < outcome_range->hi)) {
        throw ConfigError("outcome_range must satisfy lo < hi");
    }
    bool any = false;
    for (bool b : methods.enabled) any = any || b;
    if (!any) throw ConfigError("methods must enable at least one of clt|hedged|prpi|asymp");
}

ScoringEngine::ScoringEngine(const ExperimentConfig& cfg, std::uint64_t iter_id, Rng fold_rng, int dim)
    : cfg_(cfg),
      range_(cfg.resolved_range()),
      policy_(cfg.policy),
      regressor_(cfg.model, dim),
      fold_rng_(fold_rng),
      estimator_(/*keep_history=*/true) {
    result_.iter = iter_id;

    if (cfg_.policy.kind == PolicyConfig::Kind::OracleAipw) {
        oracle_dgp_ = std::make_unique<Dgp>(cfg_.dgp_or_throw());
        oracle_v_ = [this](int a, const std::vector<double>& x) { return oracle_dgp_->variance(a, x); };
    }

    ConfSeqOptions cs{cfg_.alpha, cfg_.t_min};
    if (cfg_.methods.has(Method::Hedged)) {
        HedgedCs::Options opt;
        opt.alpha = cfg_.alpha;
        opt.t_min = cfg_.t_min;
        opt.grid_size = cfg_.hedged_grid;
        opt.lambda_cap = cfg_.lambda_cap;
        hedged_.emplace(opt);
    }
    if (cfg_.methods.has(Method::Prpi)) prpi_.emplace(cs, cfg_.lambda_cap);
    if (cfg_.methods.has(Method::Asymp)) asymp_.emplace(cs, cfg_.rho);
}

PolicyDecision ScoringEngine::decide(const std::vector<double>& x, std::int64_t t) {
    const double k = policy_.config().schedule.k_at(t);
    return policy_.decide(x, t, k, &regressor_, oracle_v_ ? &oracle_v_ : nullptr);
}

Interval ScoringEngine::to_outcome_units(const Interval& unit_interval) const {
    return Interval{range_.effect_from_unit(unit_interval.lower),
                    range_.effect_from_unit(unit_interval.upper)};
}

void ScoringEngine::step(std::int64_t t, const std::vector<double>& x, int a, double y, double pi1,
                         double k) {
    const double y_unit = range_.to_unit(y);

    regressor_.assign_fold(t, fold_rng_);
    const Prediction p1 = regressor_.predict_for_score(x, 1, t);
    const Prediction p0 = regressor_.predict_for_score(x, 0, t);
    const double h = a2ipw_score(y_unit, a, p1.f, p0.f, pi1);

    const ScoreRecord rec{t, h, pi1, k, p1.f, p0.f};
    estimator_.add(rec);
    result_.scores.push_back(rec);

    const Interval full = to_outcome_units(Interval::of(-1.0, 1.0));
    if (cfg_.methods.has(Method::Clt)) {
        Interval out = full;
        if (t >= cfg_.t_min) {
            if (auto ci = clt_interval(estimator_, cfg_.alpha)) {
                out = to_outcome_units(intersect(*ci, Interval::of(-1.0, 1.0)));
            }
        }
        result_.intervals[static_cast<int>(Method::Clt)].push_back(out);
    }
    if (hedged_) {
        result_.intervals[static_cast<int>(Method::Hedged)].push_back(
            to_outcome_units(hedged_->update(h, k)));
    }
    if (prpi_) {
        result_.intervals[static_cast<int>(Method::Prpi)].push_back(
            to_outcome_units(prpi_->update(h, k)));
    }
    if (asymp_) {
        result_.intervals[static_cast<int>(Method::Asymp)].push_back(
            to_outcome_units(asymp_->update(t, estimator_.mean(), estimator_.variance())));
    }

    regressor_.update(Observation{t, x, a, y_unit});

    if (keep_stream_) {
        result_.contexts.push_back(x);
        result_.arms.push_back(a);
        result_.outcomes.push_back(y);
    }
}

IterationResult ScoringEngine::finish() {
    if (hedged_) {
        result_.width_violations += hedged_->width_violations();
        result_.hedged_gap_events = hedged_->gap_events();
        result_.hedged_ever_empty = hedged_->ever_empty();
    }
    if (prpi_) {
        result_.width_violations += prpi_->width_violations();
        result_.prpi_edge_clamps = prpi_->edge_clamp_count();
    }
    if (asymp_) result_.width_violations += asymp_->width_violations();
    return std::move(result_);
}

IterationResult run_experiment(const ExperimentConfig& cfg, std::uint64_t iter_id, bool keep_stream) {
    cfg.validate();
    const Dgp dgp(cfg.dgp_or_throw());

    Rng rng_x(cfg.seed, substream(iter_id, StreamPurpose::Context));
    Rng rng_arm(cfg.seed, substream(iter_id, StreamPurpose::Arm));
    Rng rng_y(cfg.seed, substream(iter_id, StreamPurpose::Outcome));
    Rng rng_fold(cfg.seed, substream(iter_id, StreamPurpose::Fold));

    ScoringEngine engine(cfg, iter_id, rng_fold, dgp.dim());
    engine.set_keep_stream(keep_stream);

    for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
        const std::vector<double> x = dgp.draw_context(rng_x);
        const PolicyDecision dec = engine.decide(x, t);
        const int a = sample_arm(dec.pi1, rng_arm);
        const double y = dgp.draw_outcome(rng_y, a, x);
        engine.step(t, x, a, y, dec.pi1, dec.k);
    }
    return engine.finish();
}

void run_monte_carlo(const ExperimentConfig& cfg, int threads,
                     const std::function<void(IterationResult&&)>& consume) {
    cfg.validate();
    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = static_cast<int>(std::min<std::int64_t>(n_threads, cfg.n_iters));

    std::mutex mu;
    std::map<std::uint64_t, IterationResult> parked;
    std::uint64_t next_to_claim = 0;
    std::uint64_t next_to_emit = 0;
    bool draining = false;  // exactly one thread hands results to `consume`
    const std::uint64_t total = static_cast<std::uint64_t>(cfg.n_iters);
    std::exception_ptr failure;

    auto worker = [&]() {
        while (true) {
            std::uint64_t iter;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (failure || next_to_claim >= total) return;
                iter = next_to_claim++;
            }
            try {
                const bool keep = static_cast<std::int64_t>(iter) < cfg.emit_streams;
                IterationResult result = run_experiment(cfg, iter, keep);
                std::unique_lock<std::mutex> lock(mu);
                parked.emplace(iter, std::move(result));
                if (draining) continue;
                draining = true;
                while (!parked.empty() && parked.begin()->first == next_to_emit) {
                    IterationResult ready = std::move(parked.begin()->second);
                    parked.erase(parked.begin());
                    ++next_to_emit;
                    lock.unlock();
                    consume(std::move(ready));
                    lock.lock();
                }
                draining = false;
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!failure) failure = std::current_exception();
                draining = false;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();

    if (failure) std::rethrow_exception(failure);
}

}  // namespace avate
