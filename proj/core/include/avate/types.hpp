// Domain types shared by every other module. All values are immutable once
// constructed and safe to copy across threads.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace avate {

// Raised for malformed configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised for invalid observations or stream rows (CLI exit code 3).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// One subject: context, assigned arm, observed outcome. `t` is 1-based.
struct Observation {
    std::int64_t t = 0;
    std::vector<double> x;
    int a = 0;  // arm in {0,1}
    double y = 0.0;
};

// Declared outcome bounds. All confidence-sequence math runs on outcomes
// rescaled to [0,1]; treatment effects live in [-1,1] in rescaled units and
// are mapped back through the slope hi-lo (the shift cancels in differences).
struct OutcomeRange {
    double lo = 0.0;
    double hi = 1.0;

    double span() const { return hi - lo; }
    bool contains(double y) const { return y >= lo && y <= hi; }

    double to_unit(double y) const {
        if (!contains(y)) {
            throw DataError("outcome " + std::to_string(y) + " outside declared range [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
        return (y - lo) / span();
    }
    double from_unit(double u) const { return lo + u * span(); }
    // Effects/interval endpoints scale by the span only.
    double effect_from_unit(double d) const { return d * span(); }
    double effect_to_unit(double d) const { return d / span(); }
};

inline double rescale(double y, const OutcomeRange& range) { return range.to_unit(y); }

// Propensity truncation schedule k_t. Propensities are clamped to
// [1/k_t, 1-1/k_t]; k_t >= 2 always.
struct TruncationSchedule {
    enum class Kind { Constant, Geometric };

    Kind kind = Kind::Geometric;
    double k1 = 2.0;
    double decay = 0.999;  // geometric: k_t = k_{t-1}/decay

    void validate() const {
        if (k1 < 2.0) throw ConfigError("schedule.k1 must be >= 2 (got " + std::to_string(k1) + ")");
        if (kind == Kind::Geometric && !(decay > 0.0 && decay <= 1.0)) {
            throw ConfigError("schedule.decay must lie in (0,1]");
        }
    }

    // Closed form; next_k iterates the same recursion.
    double k_at(std::int64_t t) const {
        if (kind == Kind::Constant) return k1;
        return k1 / std::pow(decay, static_cast<double>(t - 1));
    }
    double next_k(double k_prev, std::int64_t t) const {
        if (kind == Kind::Constant) return k1;
        return t <= 1 ? k1 : k_prev / decay;
    }
};

// Per-step A2IPW score together with the quantities that produced it.
// Invariant: |h| <= k whenever y and both predictions lie in [0,1] and
// pi1 is in [1/k, 1-1/k].
struct ScoreRecord {
    std::int64_t t = 0;
    double h = 0.0;
    double pi1 = 0.0;
    double k = 0.0;
    double f1_hat = 0.0;
    double f0_hat = 0.0;
};

// Closed interval with extended-real endpoints. lower > upper marks an empty
// interval (a running intersection that crossed).
struct Interval {
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    bool empty() const { return lower > upper; }
    double width() const { return empty() ? 0.0 : upper - lower; }
    bool contains(double v) const { return !empty() && lower <= v && v <= upper; }

    static Interval unbounded() { return Interval{}; }
    static Interval of(double lo, double hi) { return Interval{lo, hi}; }
};

inline Interval intersect(const Interval& a, const Interval& b) {
    return Interval{std::max(a.lower, b.lower), std::min(a.upper, b.upper)};
}

}  // namespace avate
