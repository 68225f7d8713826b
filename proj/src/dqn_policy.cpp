#include "adaptix/dqn_policy.hpp"

#include <mutex>

#include "adaptix/errors.hpp"

namespace adaptix {

DqnPolicy::DqnPolicy(std::shared_ptr<SharedDqn> shared, GridConfig grid, bool include_stats,
                     std::optional<double> fixed_epsilon)
    : shared_(std::move(shared)), grid_(grid), include_stats_(include_stats), fixed_epsilon_(fixed_epsilon) {
    if (!shared_) throw InvalidArgument("DqnPolicy needs an agent");
}

LayoutState DqnPolicy::next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) {
    auto x = encode_state(s, stats, grid_, include_stats_);
    ActionId a;
    {
        std::shared_lock lock(shared_->mutex);
        const double eps = fixed_epsilon_ ? *fixed_epsilon_ : (training_ ? shared_->agent.current_epsilon() : 0.0);
        a = shared_->agent.select_action(x, eps, rng);
    }
    pending_ = Pending{std::move(x), a.index};
    last_action_ = a.index;
    return apply_action(s, a);
}

void DqnPolicy::observe(const SessionFeedback& feedback) {
    if (!pending_) return;
    if (training_) {
        auto next = encode_state(feedback.shown, feedback.stats, grid_, include_stats_);
        std::unique_lock lock(shared_->mutex);
        shared_->agent.observe(
            Transition{std::move(pending_->state), pending_->action, feedback.reward, std::move(next), feedback.done});
    }
    pending_.reset();
}

}  // namespace adaptix
