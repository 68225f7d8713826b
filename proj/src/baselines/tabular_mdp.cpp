#include "adaptix/baselines/tabular_mdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "adaptix/errors.hpp"

namespace adaptix {

int discretize(const LayoutState& s, const InteractionStats& stats, const GridConfig& grid) {
    const int k = s.size();
    const PlacedLayout placed = pack(s, grid);

    int large_above_fold = 0;
    std::array<int, 4> color_buckets{};
    int hottest = 0;
    double hottest_rate = -1.0;
    for (int i = 0; i < k; ++i) {
        const auto& c = s.components[i];
        if (c.size == SizeClass::L && placed.placements[i].row < grid.fold_row) ++large_above_fold;
        ++color_buckets[c.color / 2];
        const double rate = c.id < static_cast<int>(stats.click_ema.size()) ? stats.click_ema[c.id] : 0.0;
        if (rate > hottest_rate) {
            hottest_rate = rate;
            hottest = i;
        }
    }
    large_above_fold = std::min(large_above_fold, 3);
    const int modal_bucket =
        static_cast<int>(std::max_element(color_buckets.begin(), color_buckets.end()) - color_buckets.begin());
    return (large_above_fold * 4 + modal_bucket) * k + hottest;
}

int QTable::greedy(int key) const {
    int best = 0;
    for (int a = 1; a < actions; ++a)
        if (at(key, a) > at(key, best)) best = a;
    return best;
}

double QTable::max_value(int key) const { return at(key, greedy(key)); }

TabularModel::TabularModel(int keys, int actions)
    : keys_(keys),
      actions_(actions),
      visits_(static_cast<std::size_t>(keys + 1) * actions, 0),
      reward_sums_(visits_.size(), 0.0),
      next_counts_(visits_.size()) {
    if (keys <= 0 || actions <= 0) throw InvalidArgument("TabularModel needs positive key and action counts");
}

std::size_t TabularModel::index(int key, int action) const {
    if (key < 0 || key > keys_ || action < 0 || action >= actions_)
        throw InvalidArgument("TabularModel: key/action out of range");
    return static_cast<std::size_t>(key) * actions_ + action;
}

void TabularModel::record(int key, int action, double reward, std::optional<int> next_key) {
    if (key == terminal_key()) throw InvalidArgument("TabularModel: cannot act from the terminal key");
    const int next = next_key.value_or(terminal_key());
    if (next < 0 || next > keys_) throw InvalidArgument("TabularModel: next key out of range");
    const auto i = index(key, action);
    ++visits_[i];
    reward_sums_[i] += reward;
    ++next_counts_[i][next];
    ++total_;
}

std::uint64_t TabularModel::transitions(int key, int action, int next_key) const {
    const auto& m = next_counts_[index(key, action)];
    auto it = m.find(next_key);
    return it == m.end() ? 0 : it->second;
}

double TabularModel::mean_reward(int key, int action) const {
    const auto i = index(key, action);
    return visits_[i] == 0 ? 0.0 : reward_sums_[i] / static_cast<double>(visits_[i]);
}

ValueIterationResult TabularModel::value_iteration(double gamma, double tol, int max_sweeps) const {
    if (!any_observed()) throw InsufficientData("value_iteration: no observed transitions");
    const int total_keys = keys_ + 1;
    ValueIterationResult result;
    result.q.keys = total_keys;
    result.q.actions = actions_;
    result.q.values.assign(static_cast<std::size_t>(total_keys) * actions_, 0.0);

    std::vector<double> v(total_keys, 0.0);
    QTable next = result.q;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (int key = 0; key < total_keys; ++key) v[key] = key == terminal_key() ? 0.0 : result.q.max_value(key);
        double gap = 0.0;
        for (int key = 0; key < keys_; ++key) {
            for (int a = 0; a < actions_; ++a) {
                const auto i = static_cast<std::size_t>(key) * actions_ + a;
                if (visits_[i] == 0) continue;
                double expected = 0.0;
                for (const auto& [k2, count] : next_counts_[i]) expected += static_cast<double>(count) * v[k2];
                expected /= static_cast<double>(visits_[i]);
                const double updated = reward_sums_[i] / static_cast<double>(visits_[i]) + gamma * expected;
                gap = std::max(gap, std::abs(updated - result.q.values[i]));
                next.values[i] = updated;
            }
        }
        result.q.values = next.values;
        result.gaps.push_back(gap);
        result.sweeps = sweep + 1;
        if (gap < tol) break;
    }
    return result;
}

}  // namespace adaptix
