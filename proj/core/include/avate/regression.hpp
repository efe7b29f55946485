// Sequential sample-split plug-in estimators for f(a,x) = E[Y|a,x] and
// e(a,x) = E[Y^2|a,x], plus the derived conditional-variance estimate.
//
// Each arriving observation is permanently assigned to one of two folds.
// Score-time predictions come from the opposite fold only; policy-time
// predictions average both folds (the subject has not been assigned to a
// fold yet at that point). During warmup an arm-conditional running-mean
// fallback is active, initialised at f(1,.)=1, f(0,.)=0.
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "avate/rng.hpp"
#include "avate/types.hpp"

namespace avate {

struct RegressionConfig {
    int knn_k = 10;            // neighbours per query; fewer points -> use all
    std::int64_t warmup = 100; // fallback active for t <= warmup
    double vfloor = 0.01;      // lower clip for variance estimates

    void validate() const {
        if (knn_k < 1) throw ConfigError("model.k must be >= 1");
        if (warmup < 0) throw ConfigError("model.warmup must be >= 0");
        if (vfloor <= 0.0) throw ConfigError("model.vfloor must be > 0");
    }
};

// Predictions are clamped so that f in [0,1] and e in [f^2, 1]; this is what
// keeps the score bound |h| <= k exact.
struct Prediction {
    double f = 0.0;
    double e = 0.0;
};

inline double variance_estimate(double f_hat, double e_hat, double floor) {
    return std::max(e_hat - f_hat * f_hat, floor);
}

class SplitRegressor {
public:
    SplitRegressor(RegressionConfig cfg, int dim);

    // Uniform random fold, recorded permanently. Assigning the same t twice
    // is a contract violation.
    int assign_fold(std::int64_t t, Rng& rng);
    int fold_of(std::int64_t t) const;  // -1 if unassigned

    // Opposite-fold predictions for the score of observation t (fold must be
    // known). Falls back to running means during warmup or when the opposite
    // fold has no data for the arm.
    Prediction predict_for_score(const std::vector<double>& x, int a, std::int64_t t) const;

    // Both-fold average, for policy decisions made before fold assignment.
    Prediction predict_for_policy(const std::vector<double>& x, int a, std::int64_t t) const;

    // Append obs to its fold's training set and refresh the fallback means.
    void update(const Observation& obs);

    std::int64_t fold_size(int fold, int arm) const;
    std::int64_t warmup() const { return cfg_.warmup; }
    double vfloor() const { return cfg_.vfloor; }

private:
    struct PointSet {
        std::vector<double> xs;  // flattened, dim_ per point
        std::vector<double> y;
        std::vector<double> y2;
    };

    Prediction knn_predict(const PointSet& set, const std::vector<double>& x) const;
    Prediction fallback(int a) const;

    RegressionConfig cfg_;
    int dim_;
    PointSet sets_[2][2];            // [fold][arm]
    std::vector<signed char> fold_;  // indexed by t, -1 = unassigned
    std::int64_t arm_count_[2] = {0, 0};
    double arm_sum_y_[2] = {0.0, 0.0};
    double arm_sum_y2_[2] = {0.0, 0.0};
};

}  // namespace avate
