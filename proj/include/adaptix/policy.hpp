#pragma once

#include <string>

#include "adaptix/layout.hpp"
#include "adaptix/rng.hpp"
#include "adaptix/user_sim.hpp"

namespace adaptix {

// What a policy learns from after one session.
struct SessionFeedback {
    const LayoutState& shown;        // layout the session ran on
    const SessionOutcome& outcome;
    double reward = 0.0;
    const InteractionStats& stats;   // updated with this session
    bool done = false;               // user churned or horizon reached
};

// Shared interface of every adaptation method: given the current layout and
// the user's interaction summary, produce the layout for the next session.
class LayoutPolicy {
public:
    virtual ~LayoutPolicy() = default;

    virtual std::string name() const = 0;

    // Learning policies update themselves only while training.
    virtual void set_training(bool training) { training_ = training; }
    bool training() const { return training_; }

    virtual void begin_episode() {}
    virtual LayoutState next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) = 0;
    virtual void observe(const SessionFeedback& feedback) { (void)feedback; }
    virtual void end_episode() {}

    // Catalog action behind the last next_layout call; -1 when the policy
    // emits whole layouts instead of mutations.
    virtual int last_action() const { return -1; }

protected:
    bool training_ = true;
};

}  // namespace adaptix
