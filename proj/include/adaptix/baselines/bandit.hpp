#pragma once

#include <cstdint>
#include <vector>

#include "adaptix/layout.hpp"

namespace adaptix {

// Pull counts and reward sums for a fixed set of candidate layouts.
struct ArmStats {
    std::vector<LayoutState> layouts;
    std::vector<std::int64_t> pulls;
    std::vector<double> reward_sums;

    explicit ArmStats(std::vector<LayoutState> arms = {});

    int arm_count() const { return static_cast<int>(pulls.size()); }
    std::int64_t total_pulls() const;
    // Undefined (throws) for an unpulled arm.
    double mean(int arm) const;
    void record(int arm, double reward);
    void reset();
};

// Unpulled arms first (lowest index); otherwise argmax of
// mean + sqrt(2 ln t / n) with lowest-index tie-breaking.
int ucb1_select(const ArmStats& arms, std::int64_t t);

// Highest empirical mean among pulled arms (lowest index on ties); 0 if none pulled.
int best_mean_arm(const ArmStats& arms);

}  // namespace adaptix
