#pragma once

#include <memory>
#include <optional>
#include <shared_mutex>

#include "adaptix/dqn.hpp"
#include "adaptix/policy.hpp"

namespace adaptix {

// A DQN agent that several sessions may use at once: action selection takes
// a shared lock, learning an exclusive one.
struct SharedDqn {
    explicit SharedDqn(DqnAgent a) : agent(std::move(a)) {}
    DqnAgent agent;
    mutable std::shared_mutex mutex;
};

// Layout policy backed by a DQN: encodes (layout, stats), picks a catalog
// action epsilon-greedily and applies it. While training, every session
// becomes a replay transition.
class DqnPolicy : public LayoutPolicy {
public:
    // With `fixed_epsilon` unset, training uses the agent's schedule and
    // evaluation is greedy.
    DqnPolicy(std::shared_ptr<SharedDqn> shared, GridConfig grid, bool include_stats,
              std::optional<double> fixed_epsilon = std::nullopt);

    std::string name() const override { return "Ours"; }
    void begin_episode() override { pending_.reset(); }
    LayoutState next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) override;
    void observe(const SessionFeedback& feedback) override;
    int last_action() const override { return last_action_; }

    const std::shared_ptr<SharedDqn>& shared() const { return shared_; }

private:
    struct Pending {
        std::vector<double> state;
        int action = 0;
    };

    std::shared_ptr<SharedDqn> shared_;
    GridConfig grid_;
    bool include_stats_;
    std::optional<double> fixed_epsilon_;
    std::optional<Pending> pending_;
    int last_action_ = -1;
};

}  // namespace adaptix
