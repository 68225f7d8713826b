#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "adaptix/baselines/bandit.hpp"
#include "adaptix/baselines/bayes_opt.hpp"
#include "adaptix/baselines/collaborative.hpp"
#include "adaptix/baselines/policy_gradient.hpp"
#include "adaptix/baselines/tabular_mdp.hpp"
#include "adaptix/dqn.hpp"
#include "adaptix/policy.hpp"

namespace adaptix {

// population: one shared model for all users; per_user: state is reset or
// conditioned per user.
enum class BaselineScope { population, per_user };
std::string_view to_string(BaselineScope s);
std::optional<BaselineScope> parse_scope(std::string_view s);

struct PolicySetup {
    LayoutState canonical;
    GridConfig grid;
    bool include_stats = true;
    double gamma = 0.95;
    std::uint64_t budget_sessions = 30000;  // training sessions the policy will see
    std::uint64_t seed = 0;
    double learning_rate = 0.001;
    OptimizerKind optimizer = OptimizerKind::adam;
    EpsilonSchedule epsilon;

    BaselineScope mab_scope = BaselineScope::population;
    BaselineScope bayes_opt_scope = BaselineScope::population;
    BaselineScope cf_scope = BaselineScope::per_user;
    int mab_arms = 32;
    int bo_evaluations = 64;
    int bo_candidates = 256;
    int bo_initial_random = 4;
    int cf_neighbors = 5;
    int mdp_resolve_every = 500;
};

// Uniformly random catalog action each session.
class RandomPolicy : public LayoutPolicy {
public:
    std::string name() const override { return "Random"; }
    LayoutState next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) override;
    int last_action() const override { return last_action_; }

private:
    int last_action_ = -1;
};

// Always shows the canonical layout.
class FixedPolicy : public LayoutPolicy {
public:
    explicit FixedPolicy(LayoutState canonical) : canonical_(std::move(canonical)) {}
    std::string name() const override { return "FixedDefault"; }
    LayoutState next_layout(const LayoutState&, const InteractionStats&, Rng&) override { return canonical_; }

private:
    LayoutState canonical_;
};

// UCB1 over M random layouts drawn from the genotype space.
class MabPolicy : public LayoutPolicy {
public:
    explicit MabPolicy(const PolicySetup& setup);
    std::string name() const override { return "MAB"; }
    void begin_episode() override;
    LayoutState next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) override;
    void observe(const SessionFeedback& feedback) override;
    const ArmStats& arms() const { return arms_; }

private:
    ArmStats arms_;
    BaselineScope scope_;
    int current_ = -1;
};

// GP surrogate over the 3K-gene layout genotype with expected-improvement
// acquisition; each evaluation averages the reward of a block of sessions.
class BayesOptPolicy : public LayoutPolicy {
public:
    explicit BayesOptPolicy(const PolicySetup& setup);
    std::string name() const override { return "BayesianOptimization"; }
    void begin_episode() override;
    LayoutState next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) override;
    void observe(const SessionFeedback& feedback) override;

    int evaluations_done() const { return static_cast<int>(observed_y_.size()); }
    std::uint64_t sessions_for_evaluation(int i) const;

private:
    void reset_search();
    void choose_next();
    std::vector<double> random_genotype();
    const std::vector<double>& best_observed() const;

    PolicySetup setup_;
    Rng rng_;
    GpSurrogate gp_;
    std::vector<std::vector<double>> observed_x_;
    std::vector<double> observed_y_;
    std::vector<double> current_x_;
    double block_reward_ = 0.0;
    std::uint64_t block_sessions_ = 0;
    bool showing_ = false;
};

// Model-based tabular control over the discretized key space, re-solved by
// value iteration every `mdp_resolve_every` sessions.
class MdpPolicy : public LayoutPolicy {
public:
    explicit MdpPolicy(const PolicySetup& setup);
    std::string name() const override { return "MDP"; }
    void set_training(bool training) override;
    void begin_episode() override { pending_.reset(); }
    LayoutState next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) override;
    void observe(const SessionFeedback& feedback) override;
    int last_action() const override { return last_action_; }
    const TabularModel& model() const { return model_; }

private:
    void resolve();

    PolicySetup setup_;
    TabularModel model_;
    std::optional<QTable> q_;
    std::uint64_t steps_ = 0;
    std::optional<std::pair<int, int>> pending_;  // (key, action)
    int last_action_ = -1;
};

// REINFORCE with an EMA baseline and entropy bonus; one update per episode.
class PgPolicy : public LayoutPolicy {
public:
    explicit PgPolicy(const PolicySetup& setup);
    std::string name() const override { return "PolicyGradient"; }
    void begin_episode() override;
    LayoutState next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) override;
    void observe(const SessionFeedback& feedback) override;
    void end_episode() override;
    int last_action() const override { return last_action_; }
    const PolicyNet& policy() const { return policy_; }

private:
    PolicySetup setup_;
    PolicyNet policy_;
    Optimizer optimizer_;
    std::vector<TrajectoryStep> trajectory_;
    std::optional<TrajectoryStep> pending_;
    int last_action_ = -1;
};

// User-based collaborative filtering on per-kind click rates.
class CfPolicy : public LayoutPolicy {
public:
    explicit CfPolicy(const PolicySetup& setup);
    std::string name() const override { return "CollaborativeFiltering"; }
    void begin_episode() override { profile_ = {}; }
    LayoutState next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) override;
    void observe(const SessionFeedback& feedback) override { profile_.record(feedback.shown, feedback.outcome); }
    void end_episode() override;
    const InteractionMatrix& matrix() const { return matrix_; }

private:
    PolicySetup setup_;
    InteractionMatrix matrix_;
    UserProfile profile_;
};

}  // namespace adaptix
