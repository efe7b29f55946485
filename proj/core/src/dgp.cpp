#include "avate/dgp.hpp"

#include <algorithm>
#include <cmath>

namespace avate {

void DgpConfig::validate() const {
    if (kind == Kind::Bernoulli && !(theta0 >= 0.0 && theta0 <= 0.1)) {
        // p = 0.9*sigmoid(.) + theta0*a must stay a probability.
        throw ConfigError("dgp.theta0 must lie in [0, 0.1] for the bernoulli design");
    }
    if (!std::isfinite(theta0)) throw ConfigError("dgp.theta0 must be finite");
}

Dgp::Dgp(DgpConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    switch (cfg_.kind) {
        case DgpConfig::Kind::Bernoulli:
        case DgpConfig::Kind::TruncationStudy:
            beta_ = {-2.0, -3.0, 5.0};
            range_ = OutcomeRange{0.0, 1.0};
            break;
        case DgpConfig::Kind::Bounded: {
            beta_ = {-0.04, -0.01, 0.05};
            // x_i in (0,1), so x.beta in (sum of negative betas, sum of positive
            // betas); the noise arm widens by 4.5*max|x.beta|.
            double neg = 0.0, pos = 0.0;
            for (double b : beta_) (b < 0.0 ? neg : pos) += b;
            const double m = std::max(-neg, pos);
            const double lo0 = 0.4 + neg - 0.05;
            const double hi0 = 0.4 + pos + 0.05;
            const double lo1 = 0.4 + neg + cfg_.theta0 - 4.5 * m;
            const double hi1 = 0.4 + pos + cfg_.theta0 + 4.5 * m;
            range_ = OutcomeRange{std::min(lo0, lo1), std::max(hi0, hi1)};
            break;
        }
    }
}

double Dgp::dot_beta(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < beta_.size(); ++i) s += beta_[i] * x[i];
    return s;
}

std::vector<double> Dgp::draw_context(Rng& rng) const {
    std::vector<double> x(3);
    if (cfg_.kind == DgpConfig::Kind::Bounded) {
        for (double& v : x) v = rng.uniform();
    } else {
        for (double& v : x) v = rng.normal();
    }
    return x;
}

double Dgp::mean(int a, const std::vector<double>& x) const {
    const double xb = dot_beta(x);
    switch (cfg_.kind) {
        case DgpConfig::Kind::Bernoulli:
            return 0.9 * sigmoid(0.5 + xb) + cfg_.theta0 * a;
        case DgpConfig::Kind::TruncationStudy:
            return 0.1 * sigmoid(0.5 + xb) + 0.4 * a;
        case DgpConfig::Kind::Bounded:
            return 0.4 + xb + cfg_.theta0 * a;
    }
    return 0.0;
}

double Dgp::variance(int a, const std::vector<double>& x) const {
    switch (cfg_.kind) {
        case DgpConfig::Kind::Bernoulli:
        case DgpConfig::Kind::TruncationStudy: {
            const double p = mean(a, x);
            return p * (1.0 - p);
        }
        case DgpConfig::Kind::Bounded: {
            // Uniform(lo,hi) variance (hi-lo)^2/12.
            if (a == 0) return 0.1 * 0.1 / 12.0;
            const double w = 9.0 * std::abs(dot_beta(x));
            return w * w / 12.0;
        }
    }
    return 0.0;
}

double Dgp::ate() const {
    return cfg_.kind == DgpConfig::Kind::TruncationStudy ? 0.4 : cfg_.theta0;
}

double Dgp::draw_outcome(Rng& rng, int a, const std::vector<double>& x) const {
    switch (cfg_.kind) {
        case DgpConfig::Kind::Bernoulli:
        case DgpConfig::Kind::TruncationStudy:
            return rng.bernoulli(mean(a, x)) ? 1.0 : 0.0;
        case DgpConfig::Kind::Bounded: {
            const double xb = dot_beta(x);
            double y;
            if (a == 0) {
                y = 0.4 + xb + rng.uniform(-0.05, 0.05);
            } else {
                // Endpoints are sorted: x.beta may be negative.
                const double half = 4.5 * xb;
                const double lo = std::min(-half, half);
                const double hi = std::max(-half, half);
                const double eps = lo == hi ? 0.0 : rng.uniform(lo, hi);
                y = 0.4 + xb + cfg_.theta0 + eps;
            }
            // Exact arithmetic keeps y inside the declared range; clamp the
            // last-ulp rounding dust.
            return std::clamp(y, range_.lo, range_.hi);
        }
    }
    return 0.0;
}

}  // namespace avate
