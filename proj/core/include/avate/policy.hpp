// Treatment-assignment policies: the variance-optimal allocation
// sqrt(v1)/(sqrt(v1)+sqrt(v0)), its plug-in version driven by the split
// regressor, fixed randomisation, and the propensity truncation that clamps
// every decision into [1/k_t, 1-1/k_t].
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include "avate/regression.hpp"
#include "avate/rng.hpp"
#include "avate/types.hpp"

namespace avate {

struct PolicyDecision {
    double pi1_raw = 0.5;  // pre-truncation
    double pi1 = 0.5;      // clamped to [1/k, 1-1/k]
    double k = 2.0;
};

inline double aipw_policy(double v1, double v0) {
    if (!(v1 > 0.0) || !(v0 > 0.0)) throw std::logic_error("aipw_policy: variances must be > 0");
    const double s1 = std::sqrt(v1);
    const double s0 = std::sqrt(v0);
    return s1 / (s1 + s0);
}

inline double truncate_propensity(double pi_raw, double k) {
    if (k < 2.0) throw ConfigError("truncation parameter k must be >= 2");
    return std::clamp(pi_raw, 1.0 / k, 1.0 - 1.0 / k);
}

inline int sample_arm(double pi1, Rng& rng) { return rng.bernoulli(pi1) ? 1 : 0; }

// Oracle conditional variance v(a, x), available in simulation studies.
using OracleVariance = std::function<double(int a, const std::vector<double>& x)>;

struct PolicyConfig {
    enum class Kind { A2ipw, Fixed, OracleAipw };

    Kind kind = Kind::A2ipw;
    double fixed_p = 0.5;       // Fixed only
    std::int64_t warmup = 100;  // A2ipw: pi = 0.5 for t <= warmup
    TruncationSchedule schedule;

    void validate() const {
        schedule.validate();
        if (kind == Kind::Fixed && !(fixed_p > 0.0 && fixed_p < 1.0)) {
            throw ConfigError("policy.fixed_p must lie in (0,1)");
        }
        if (warmup < 0) throw ConfigError("policy.warmup must be >= 0");
    }
};

class Policy {
public:
    explicit Policy(PolicyConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    const PolicyConfig& config() const { return cfg_; }

    // k advances once per subject regardless of arm; the caller passes the
    // active k_t. The oracle variance is consulted only for OracleAipw.
    PolicyDecision decide(const std::vector<double>& x, std::int64_t t, double k,
                          const SplitRegressor* regressor, const OracleVariance* oracle) const {
        double pi_raw = 0.5;
        switch (cfg_.kind) {
            case PolicyConfig::Kind::Fixed:
                pi_raw = cfg_.fixed_p;
                break;
            case PolicyConfig::Kind::OracleAipw: {
                if (t <= cfg_.warmup) {
                    pi_raw = 0.5;
                    break;
                }
                if (oracle == nullptr) throw std::logic_error("oracle-aipw policy without oracle variance");
                pi_raw = aipw_policy((*oracle)(1, x), (*oracle)(0, x));
                break;
            }
            case PolicyConfig::Kind::A2ipw: {
                if (t <= cfg_.warmup) {
                    pi_raw = 0.5;
                } else {
                    if (regressor == nullptr) throw std::logic_error("a2ipw policy without regressor");
                    const Prediction p1 = regressor->predict_for_policy(x, 1, t);
                    const Prediction p0 = regressor->predict_for_policy(x, 0, t);
                    const double v1 = variance_estimate(p1.f, p1.e, regressor->vfloor());
                    const double v0 = variance_estimate(p0.f, p0.e, regressor->vfloor());
                    pi_raw = aipw_policy(v1, v0);
                }
                break;
            }
        }
        return PolicyDecision{pi_raw, truncate_propensity(pi_raw, k), k};
    }

private:
    PolicyConfig cfg_;
};

}  // namespace avate
