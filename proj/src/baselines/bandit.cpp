#include "adaptix/baselines/bandit.hpp"

#include <cmath>
#include <numeric>

#include "adaptix/errors.hpp"

namespace adaptix {

ArmStats::ArmStats(std::vector<LayoutState> arms)
    : layouts(std::move(arms)), pulls(layouts.size(), 0), reward_sums(layouts.size(), 0.0) {}

std::int64_t ArmStats::total_pulls() const { return std::accumulate(pulls.begin(), pulls.end(), std::int64_t{0}); }

double ArmStats::mean(int arm) const {
    if (pulls.at(arm) == 0) throw InvalidArgument("mean of an unpulled arm");
    return reward_sums[arm] / static_cast<double>(pulls[arm]);
}

void ArmStats::record(int arm, double reward) {
    ++pulls.at(arm);
    reward_sums[arm] += reward;
}

void ArmStats::reset() {
    std::fill(pulls.begin(), pulls.end(), 0);
    std::fill(reward_sums.begin(), reward_sums.end(), 0.0);
}

int ucb1_select(const ArmStats& arms, std::int64_t t) {
    if (arms.arm_count() == 0) throw InvalidArgument("ucb1_select: no arms");
    for (int i = 0; i < arms.arm_count(); ++i)
        if (arms.pulls[i] == 0) return i;
    const double log_t = std::log(static_cast<double>(std::max<std::int64_t>(t, 1)));
    int best = 0;
    double best_score = -INFINITY;
    for (int i = 0; i < arms.arm_count(); ++i) {
        const double score = arms.mean(i) + std::sqrt(2.0 * log_t / static_cast<double>(arms.pulls[i]));
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

int best_mean_arm(const ArmStats& arms) {
    int best = 0;
    double best_mean = -INFINITY;
    for (int i = 0; i < arms.arm_count(); ++i) {
        if (arms.pulls[i] == 0) continue;
        const double m = arms.mean(i);
        if (m > best_mean) {
            best_mean = m;
            best = i;
        }
    }
    return best;
}

}  // namespace adaptix
