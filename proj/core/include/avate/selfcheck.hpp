// Fast invariant suite behind the `selfcheck` CLI command: score bounds,
// psi_E spot values, the rho optimiser against a brute-force grid, and
// reduced-size one-step martingale Monte Carlo checks.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace avate {

struct SelfcheckOptions {
    std::uint64_t seed = 7;
    // Mutation hook: biases the psi_E evaluation inside the check so a
    // deliberately broken constant is caught (used to prove the suite can
    // fail).
    double psi_bias = 0.0;
};

struct SelfcheckReport {
    struct Item {
        std::string name;
        bool pass = false;
        std::string detail;
    };
    std::vector<Item> items;
    bool all_pass() const {
        for (const Item& it : items)
            if (!it.pass) return false;
        return true;
    }
};

SelfcheckReport run_selfcheck(const SelfcheckOptions& options = {});

}  // namespace avate
