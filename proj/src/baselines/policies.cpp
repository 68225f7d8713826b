#include "adaptix/baselines/policies.hpp"

#include <algorithm>

#include "adaptix/errors.hpp"

namespace adaptix {

std::string_view to_string(BaselineScope s) { return s == BaselineScope::population ? "population" : "per_user"; }

std::optional<BaselineScope> parse_scope(std::string_view s) {
    if (s == "population") return BaselineScope::population;
    if (s == "per_user") return BaselineScope::per_user;
    return std::nullopt;
}

// ---------------------------------------------------------------- Random

LayoutState RandomPolicy::next_layout(const LayoutState& s, const InteractionStats&, Rng& rng) {
    last_action_ = static_cast<int>(rng.below(action_count(s.size())));
    return apply_action(s, ActionId{last_action_});
}

// ---------------------------------------------------------------- MAB

namespace {

std::vector<LayoutState> random_arms(const PolicySetup& setup) {
    Rng rng(mix_seed(setup.seed, 0xa2a5));
    const int genes = 3 * setup.canonical.size();
    std::vector<LayoutState> arms;
    for (int i = 0; i < setup.mab_arms; ++i) {
        std::vector<double> x(genes);
        for (double& v : x) v = rng.uniform();
        arms.push_back(decode_genotype(x, setup.canonical));
    }
    return arms;
}

}  // namespace

MabPolicy::MabPolicy(const PolicySetup& setup) : arms_(random_arms(setup)), scope_(setup.mab_scope) {
    if (setup.mab_arms < 1) throw InvalidArgument("MAB needs at least one arm");
}

void MabPolicy::begin_episode() {
    current_ = -1;
    if (scope_ == BaselineScope::per_user) arms_.reset();
}

LayoutState MabPolicy::next_layout(const LayoutState&, const InteractionStats&, Rng&) {
    const bool explore = training_ || scope_ == BaselineScope::per_user;
    current_ = explore ? ucb1_select(arms_, arms_.total_pulls() + 1) : best_mean_arm(arms_);
    return arms_.layouts[current_];
}

void MabPolicy::observe(const SessionFeedback& feedback) {
    if (current_ < 0) return;
    if (training_ || scope_ == BaselineScope::per_user) arms_.record(current_, feedback.reward);
}

// ---------------------------------------------------------------- BayesOpt

BayesOptPolicy::BayesOptPolicy(const PolicySetup& setup) : setup_(setup), rng_(mix_seed(setup.seed, 0xb0b0)) {
    if (setup.bo_evaluations < 1 || setup.bo_candidates < 1)
        throw InvalidArgument("BayesOpt needs positive evaluation and candidate counts");
    reset_search();
}

std::uint64_t BayesOptPolicy::sessions_for_evaluation(int i) const {
    if (setup_.bayes_opt_scope == BaselineScope::per_user) return 1;
    const auto evals = static_cast<std::uint64_t>(setup_.bo_evaluations);
    const std::uint64_t base = setup_.budget_sessions / evals;
    const std::uint64_t extra = static_cast<std::uint64_t>(i) < setup_.budget_sessions % evals ? 1 : 0;
    return std::max<std::uint64_t>(1, base + extra);
}

std::vector<double> BayesOptPolicy::random_genotype() {
    std::vector<double> x(3 * setup_.canonical.size());
    for (double& v : x) v = rng_.uniform();
    return x;
}

void BayesOptPolicy::reset_search() {
    gp_ = GpSurrogate();
    observed_x_.clear();
    observed_y_.clear();
    current_x_ = random_genotype();
    block_reward_ = 0.0;
    block_sessions_ = 0;
}

const std::vector<double>& BayesOptPolicy::best_observed() const {
    const auto it = std::max_element(observed_y_.begin(), observed_y_.end());
    return observed_x_[static_cast<std::size_t>(it - observed_y_.begin())];
}

void BayesOptPolicy::choose_next() {
    const int done = evaluations_done();
    if (done >= setup_.bo_evaluations) {
        current_x_ = best_observed();
        return;
    }
    if (done < setup_.bo_initial_random) {
        current_x_ = random_genotype();
        return;
    }
    // Centre the targets: the surrogate has a zero prior mean.
    double mean = 0.0;
    for (double y : observed_y_) mean += y;
    mean /= static_cast<double>(observed_y_.size());
    std::vector<double> centred;
    for (double y : observed_y_) centred.push_back(y - mean);
    gp_.fit(observed_x_, centred);
    const double best = *std::max_element(centred.begin(), centred.end());

    std::vector<std::vector<double>> candidates;
    candidates.reserve(setup_.bo_candidates);
    for (int i = 0; i < setup_.bo_candidates; ++i) candidates.push_back(random_genotype());
    current_x_ = candidates[ei_acquire(gp_, candidates, best)];
}

void BayesOptPolicy::begin_episode() {
    showing_ = false;
    if (setup_.bayes_opt_scope == BaselineScope::per_user) reset_search();
}

LayoutState BayesOptPolicy::next_layout(const LayoutState&, const InteractionStats&, Rng&) {
    showing_ = true;
    const bool searching = training_ || setup_.bayes_opt_scope == BaselineScope::per_user;
    if (!searching && !observed_y_.empty()) return decode_genotype(best_observed(), setup_.canonical);
    return decode_genotype(current_x_, setup_.canonical);
}

void BayesOptPolicy::observe(const SessionFeedback& feedback) {
    const bool searching = training_ || setup_.bayes_opt_scope == BaselineScope::per_user;
    if (!showing_ || !searching || evaluations_done() >= setup_.bo_evaluations) return;
    block_reward_ += feedback.reward;
    ++block_sessions_;
    if (block_sessions_ < sessions_for_evaluation(evaluations_done())) return;
    observed_x_.push_back(current_x_);
    observed_y_.push_back(block_reward_ / static_cast<double>(block_sessions_));
    block_reward_ = 0.0;
    block_sessions_ = 0;
    choose_next();
}

// ---------------------------------------------------------------- MDP

MdpPolicy::MdpPolicy(const PolicySetup& setup)
    : setup_(setup), model_(key_space(setup.canonical.size()), action_count(setup.canonical.size())) {}

void MdpPolicy::resolve() {
    if (model_.any_observed()) q_ = model_.value_iteration(setup_.gamma, 1e-8).q;
}

void MdpPolicy::set_training(bool training) {
    if (training_ && !training) resolve();
    LayoutPolicy::set_training(training);
}

LayoutState MdpPolicy::next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) {
    const int key = discretize(s, stats, setup_.grid);
    const int actions = model_.actions();
    const double eps = training_ ? setup_.epsilon.at(steps_, setup_.budget_sessions) : 0.0;
    int action;
    if (rng.uniform() < eps || !q_)
        action = training_ || !q_ ? static_cast<int>(rng.below(actions)) : q_->greedy(key);
    else
        action = q_->greedy(key);
    pending_ = std::make_pair(key, action);
    last_action_ = action;
    return apply_action(s, ActionId{action});
}

void MdpPolicy::observe(const SessionFeedback& feedback) {
    if (!training_ || !pending_) return;
    const auto [key, action] = *pending_;
    std::optional<int> next;
    if (!feedback.done) next = discretize(feedback.shown, feedback.stats, setup_.grid);
    model_.record(key, action, feedback.reward, next);
    pending_.reset();
    ++steps_;
    if (steps_ % static_cast<std::uint64_t>(setup_.mdp_resolve_every) == 0) resolve();
}

// ---------------------------------------------------------------- Policy gradient

namespace {

PolicyNet make_policy_net(const PolicySetup& setup) {
    const int k = setup.canonical.size();
    Rng rng(mix_seed(setup.seed, 0x9a9a));
    return PolicyNet{Mlp({feature_length(k), 64, 64, action_count(k)}, rng)};
}

}  // namespace

PgPolicy::PgPolicy(const PolicySetup& setup)
    : setup_(setup),
      policy_(make_policy_net(setup)),
      optimizer_(setup.optimizer, OptimizerParams{.learning_rate = setup.learning_rate}) {}

void PgPolicy::begin_episode() {
    trajectory_.clear();
    pending_.reset();
}

LayoutState PgPolicy::next_layout(const LayoutState& s, const InteractionStats& stats, Rng& rng) {
    auto x = encode_state(s, stats, setup_.grid, setup_.include_stats);
    const auto p = policy_.probabilities(x);
    int action = 0;
    if (training_) {
        const double u = rng.uniform();
        double cum = 0.0;
        action = static_cast<int>(p.size()) - 1;
        for (int a = 0; a < static_cast<int>(p.size()); ++a) {
            cum += p[a];
            if (u < cum) {
                action = a;
                break;
            }
        }
    } else {
        action = greedy_action(p);
    }
    pending_ = TrajectoryStep{std::move(x), action, 0.0};
    last_action_ = action;
    return apply_action(s, ActionId{action});
}

void PgPolicy::observe(const SessionFeedback& feedback) {
    if (!training_ || !pending_) return;
    pending_->reward = feedback.reward;
    trajectory_.push_back(std::move(*pending_));
    pending_.reset();
}

void PgPolicy::end_episode() {
    if (training_ && !trajectory_.empty()) reinforce_update(policy_, trajectory_, setup_.gamma, optimizer_);
    trajectory_.clear();
}

// ---------------------------------------------------------------- Collaborative filtering

CfPolicy::CfPolicy(const PolicySetup& setup) : setup_(setup) {}

LayoutState CfPolicy::next_layout(const LayoutState&, const InteractionStats&, Rng&) {
    if (profile_.sessions == 0 || matrix_.users() == 0) return setup_.canonical;
    CfPrediction pred;
    if (setup_.cf_scope == BaselineScope::per_user) {
        pred = cf_predict(matrix_, profile_.click_rates(), setup_.cf_neighbors);
    } else {
        pred.fallback = true;
        for (const auto& row : matrix_.rates)
            for (int k = 0; k < kKindCount; ++k) pred.preference[k] += row[k];
        for (double& v : pred.preference) v /= matrix_.users();
    }
    std::vector<int> rows = pred.neighbors;
    if (pred.fallback) {
        rows.resize(matrix_.users());
        for (int u = 0; u < matrix_.users(); ++u) rows[u] = u;
    }
    return cf_layout(pred.preference, setup_.canonical, modal_clicked_color(matrix_, rows));
}

void CfPolicy::end_episode() {
    if (training_ && profile_.sessions > 0) matrix_.add(profile_);
}

}  // namespace adaptix
