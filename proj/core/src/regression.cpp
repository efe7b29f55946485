#include "avate/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace avate {

namespace {

inline Prediction clamp_prediction(double f, double e) {
    f = std::clamp(f, 0.0, 1.0);
    e = std::clamp(e, f * f, 1.0);
    return {f, e};
}

}  // namespace

SplitRegressor::SplitRegressor(RegressionConfig cfg, int dim) : cfg_(cfg), dim_(dim) {
    cfg_.validate();
    if (dim_ < 1) throw ConfigError("context dimension must be >= 1");
}

int SplitRegressor::assign_fold(std::int64_t t, Rng& rng) {
    if (t < 1) throw std::logic_error("assign_fold: t must be >= 1");
    if (static_cast<std::size_t>(t) >= fold_.size()) fold_.resize(t + 1, -1);
    if (fold_[t] != -1) throw std::logic_error("assign_fold: t already assigned");
    fold_[t] = rng.bernoulli(0.5) ? 1 : 0;
    return fold_[t];
}

int SplitRegressor::fold_of(std::int64_t t) const {
    if (t < 1 || static_cast<std::size_t>(t) >= fold_.size()) return -1;
    return fold_[t];
}

Prediction SplitRegressor::fallback(int a) const {
    // Arm-conditional running means; before any arm-a observation the prior
    // is f(1,.)=1, f(0,.)=0 (and e clamped consistently).
    if (arm_count_[a] == 0) return clamp_prediction(a == 1 ? 1.0 : 0.0, a == 1 ? 1.0 : 0.0);
    const double n = static_cast<double>(arm_count_[a]);
    return clamp_prediction(arm_sum_y_[a] / n, arm_sum_y2_[a] / n);
}

Prediction SplitRegressor::knn_predict(const PointSet& set, const std::vector<double>& x) const {
    const std::int64_t n = static_cast<std::int64_t>(set.y.size());
    const int k = static_cast<int>(std::min<std::int64_t>(cfg_.knn_k, n));

    // Max-heap of (distance, index) keeping the k closest points.
    struct Entry {
        double d2;
        std::int64_t i;
    };
    std::vector<Entry> heap;
    heap.reserve(k);
    auto cmp = [](const Entry& a, const Entry& b) { return a.d2 < b.d2; };

    for (std::int64_t i = 0; i < n; ++i) {
        const double* p = set.xs.data() + i * dim_;
        double d2 = 0.0;
        for (int j = 0; j < dim_; ++j) {
            const double diff = p[j] - x[j];
            d2 += diff * diff;
        }
        if (static_cast<int>(heap.size()) < k) {
            heap.push_back({d2, i});
            std::push_heap(heap.begin(), heap.end(), cmp);
        } else if (d2 < heap.front().d2) {
            std::pop_heap(heap.begin(), heap.end(), cmp);
            heap.back() = {d2, i};
            std::push_heap(heap.begin(), heap.end(), cmp);
        }
    }

    double sum_y = 0.0, sum_y2 = 0.0;
    for (const Entry& e : heap) {
        sum_y += set.y[e.i];
        sum_y2 += set.y2[e.i];
    }
    const double kk = static_cast<double>(heap.size());
    return clamp_prediction(sum_y / kk, sum_y2 / kk);
}

Prediction SplitRegressor::predict_for_score(const std::vector<double>& x, int a, std::int64_t t) const {
    const int fold = fold_of(t);
    if (fold < 0) throw std::logic_error("predict_for_score: fold of t unknown");
    if (t <= cfg_.warmup) return fallback(a);
    const PointSet& opposite = sets_[1 - fold][a];
    if (opposite.y.empty()) return fallback(a);
    return knn_predict(opposite, x);
}

Prediction SplitRegressor::predict_for_policy(const std::vector<double>& x, int a, std::int64_t t) const {
    if (t <= cfg_.warmup) return fallback(a);
    double sum_f = 0.0, sum_e = 0.0;
    int used = 0;
    for (int fold = 0; fold < 2; ++fold) {
        const PointSet& set = sets_[fold][a];
        if (set.y.empty()) continue;
        const Prediction p = knn_predict(set, x);
        sum_f += p.f;
        sum_e += p.e;
        ++used;
    }
    if (used == 0) return fallback(a);
    return clamp_prediction(sum_f / used, sum_e / used);
}

void SplitRegressor::update(const Observation& obs) {
    const int fold = fold_of(obs.t);
    if (fold < 0) throw std::logic_error("update: fold of t unknown");
    if (obs.a != 0 && obs.a != 1) throw std::logic_error("update: arm must be 0 or 1");
    if (static_cast<int>(obs.x.size()) != dim_) throw std::logic_error("update: context dimension mismatch");

    PointSet& set = sets_[fold][obs.a];
    set.xs.insert(set.xs.end(), obs.x.begin(), obs.x.end());
    set.y.push_back(obs.y);
    set.y2.push_back(obs.y * obs.y);

    arm_count_[obs.a] += 1;
    arm_sum_y_[obs.a] += obs.y;
    arm_sum_y2_[obs.a] += obs.y * obs.y;
}

std::int64_t SplitRegressor::fold_size(int fold, int arm) const {
    return static_cast<std::int64_t>(sets_[fold][arm].y.size());
}

}  // namespace avate
