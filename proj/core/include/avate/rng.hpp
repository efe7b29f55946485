// Deterministic random source. A (seed, stream) pair reproduces the exact
// same draw sequence; distinct streams are seeded through independent
// splitmix64 mixes of the pair. Distribution transforms are hand-rolled so
// the sequence does not depend on the standard library implementation.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace avate {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t s = seed;
        (void)detail::splitmix64(s);
        s ^= 0xd1b54a32d192ed03ULL * (stream + 1);
        engine_.seed(detail::splitmix64(s));
    }

    // Uniform on [0,1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via the Marsaglia polar method (cached spare).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Sub-stream layout used by the simulation harness: each iteration owns four
// independent streams (context, arm, outcome, fold assignment). `infer`
// reconstructs the fold stream of a given iteration from the same layout.
enum class StreamPurpose : std::uint64_t { Context = 0, Arm = 1, Outcome = 2, Fold = 3 };

inline std::uint64_t substream(std::uint64_t iter, StreamPurpose p) {
    return iter * 4 + static_cast<std::uint64_t>(p);
}

inline Rng seeded_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(seed, stream); }

}  // namespace avate
