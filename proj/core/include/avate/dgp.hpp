// Synthetic data-generating processes for the simulation studies. Each DGP
// exposes its true conditional mean/variance (for oracle policies and test
// oracles), its exact average effect, and the outcome range implied by its
// parameters.
#pragma once

#include <cstdint>
#include <vector>

#include "avate/rng.hpp"
#include "avate/types.hpp"

namespace avate {

struct DgpConfig {
    enum class Kind { Bernoulli, Bounded, TruncationStudy };

    Kind kind = Kind::Bernoulli;
    double theta0 = 0.1;  // ignored by TruncationStudy (its effect is fixed)

    void validate() const;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

class Dgp {
public:
    explicit Dgp(DgpConfig cfg);

    int dim() const { return 3; }
    std::vector<double> draw_context(Rng& rng) const;
    double draw_outcome(Rng& rng, int a, const std::vector<double>& x) const;

    double mean(int a, const std::vector<double>& x) const;      // E[Y | a, x]
    double variance(int a, const std::vector<double>& x) const;  // Var(Y | a, x)
    double ate() const;
    OutcomeRange range() const { return range_; }
    const DgpConfig& config() const { return cfg_; }

private:
    double dot_beta(const std::vector<double>& x) const;

    DgpConfig cfg_;
    std::vector<double> beta_;
    OutcomeRange range_;
};

}  // namespace avate
