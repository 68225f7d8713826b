#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "adaptix/layout.hpp"

namespace adaptix {

// key = (L-size components above the fold, capped at 3)
//     x (modal color bucket color/2)
//     x (position of the component with the highest click EMA).
int discretize(const LayoutState& s, const InteractionStats& stats, const GridConfig& grid = {});
inline int key_space(int k) { return 4 * 4 * k; }

struct QTable {
    int keys = 0;
    int actions = 0;
    std::vector<double> values;  // keys x actions, row-major

    double at(int key, int action) const { return values[static_cast<std::size_t>(key) * actions + action]; }
    double& at(int key, int action) { return values[static_cast<std::size_t>(key) * actions + action]; }
    int greedy(int key) const;
    double max_value(int key) const;
};

struct ValueIterationResult {
    QTable q;
    int sweeps = 0;
    std::vector<double> gaps;  // max |Q_{n+1} - Q_n| per sweep
};

// Empirical model over keys [0, keys) plus one absorbing terminal key
// (index `keys`) with zero reward.
class TabularModel {
public:
    TabularModel(int keys, int actions);

    int keys() const { return keys_; }
    int actions() const { return actions_; }
    int terminal_key() const { return keys_; }

    // next_key == nullopt records a terminal transition.
    void record(int key, int action, double reward, std::optional<int> next_key);

    std::uint64_t visits(int key, int action) const { return visits_[index(key, action)]; }
    std::uint64_t transitions(int key, int action, int next_key) const;
    double mean_reward(int key, int action) const;
    bool observed(int key, int action) const { return visits(key, action) > 0; }
    bool any_observed() const { return total_ > 0; }

    // Q(k,a) <- R(k,a) + gamma * sum_k' P(k'|k,a) max_a' Q(k',a') on observed
    // pairs (synchronous sweeps) until the max change is below tol.
    // Unobserved pairs stay at 0.
    ValueIterationResult value_iteration(double gamma, double tol = 1e-8, int max_sweeps = 100000) const;

private:
    std::size_t index(int key, int action) const;

    int keys_;
    int actions_;
    std::uint64_t total_ = 0;
    std::vector<std::uint64_t> visits_;
    std::vector<double> reward_sums_;
    std::vector<std::map<int, std::uint64_t>> next_counts_;
};

}  // namespace adaptix
