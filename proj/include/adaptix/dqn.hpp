#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "adaptix/layout.hpp"
#include "adaptix/nn.hpp"
#include "adaptix/optimizer.hpp"
#include "adaptix/rng.hpp"
#include "json.hpp"

namespace adaptix {

struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

// Fixed-capacity FIFO ring; the oldest entry is overwritten when full.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 20000);

    void push(Transition t);
    // Uniform with replacement. Throws InsufficientData when size() < n.
    std::vector<Transition> sample(std::size_t n, Rng& rng) const;

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    // i-th oldest stored transition.
    const Transition& at(std::size_t i) const;

private:
    std::size_t capacity_;
    std::size_t head_ = 0;  // next slot to overwrite once full
    std::vector<Transition> items_;
};

// Linear decay from `start` to `end` over `fraction` of the run, then flat.
struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    double fraction = 0.6;

    double at(std::uint64_t step, std::uint64_t total_steps) const;
};

struct AgentConfig {
    double gamma = 0.95;
    EpsilonSchedule epsilon;
    int batch_size = 64;
    std::size_t min_replay = 500;
    std::size_t replay_capacity = 20000;
    int target_sync_every = 250;  // gradient steps
    std::vector<int> hidden = {64, 64};
    OptimizerKind optimizer = OptimizerKind::adam;
    double learning_rate = 0.001;

    void validate() const;
};

// r if done, else r + gamma * max(next_q).
double bellman_target(double reward, double gamma, std::span<const double> next_q, bool done);

// Argmax with lowest-index tie-breaking.
int greedy_action(std::span<const double> q);

class DqnAgent {
public:
    DqnAgent(int input_dim, int action_count, AgentConfig cfg, std::uint64_t seed);
    // Uses `online` as the initial network (e.g. a linear head for tabular checks).
    DqnAgent(Mlp online, AgentConfig cfg, std::uint64_t seed);

    const AgentConfig& config() const { return cfg_; }
    const Mlp& online() const { return online_; }
    Mlp& online() { return online_; }
    const Mlp& target() const { return target_; }
    Mlp& target() { return target_; }
    ReplayBuffer& replay() { return replay_; }
    const ReplayBuffer& replay() const { return replay_; }
    const Optimizer& optimizer() const { return optimizer_; }
    int action_count() const { return online_.output_dim(); }
    int input_dim() const { return online_.input_dim(); }

    std::vector<double> q_values(std::span<const double> x) const { return online_.forward(x); }

    // Uniform over the catalog with probability epsilon, else greedy.
    ActionId select_action(std::span<const double> x, double epsilon, Rng& rng) const;

    // One gradient step of mean squared Bellman error against the target
    // network. Returns the loss before the update.
    double train_step(std::span<const Transition> batch);

    void sync_target() { target_ = online_; }

    // --- learning-loop bookkeeping -------------------------------------
    // Number of environment steps the epsilon schedule is stretched over.
    void set_schedule_length(std::uint64_t total_steps) { schedule_length_ = total_steps; }
    std::uint64_t schedule_length() const { return schedule_length_; }
    double current_epsilon() const { return cfg_.epsilon.at(env_steps_, schedule_length_); }
    ActionId act(std::span<const double> x, Rng& rng) const { return select_action(x, current_epsilon(), rng); }

    // Stores the transition and, once the replay holds min_replay items,
    // samples a batch and trains; syncs the target every target_sync_every
    // gradient steps. Returns the loss when a gradient step ran.
    std::optional<double> observe(Transition t);

    std::uint64_t env_steps() const { return env_steps_; }
    std::uint64_t gradient_steps() const { return gradient_steps_; }

    // Versioned JSON checkpoint (layer dims, row-major parameters per layer,
    // optimizer kind/state, step counters). Replay contents are not saved.
    nlohmann::json to_json() const;
    static DqnAgent from_json(const nlohmann::json& j, std::uint64_t seed = 0);
    void save(const std::filesystem::path& path) const;
    static DqnAgent load(const std::filesystem::path& path, std::uint64_t seed = 0);

private:
    AgentConfig cfg_;
    Mlp online_;
    Mlp target_;
    Optimizer optimizer_;
    ReplayBuffer replay_;
    Rng rng_;
    std::vector<double> grads_;
    std::uint64_t schedule_length_ = 1;
    std::uint64_t env_steps_ = 0;
    std::uint64_t gradient_steps_ = 0;
};

// Episodic environment over feature vectors and integer actions.
class Environment {
public:
    struct Step {
        std::vector<double> next_state;
        double reward = 0.0;
        bool done = false;       // terminal: no bootstrap
        bool truncated = false;  // episode cut without a terminal state
    };

    virtual ~Environment() = default;
    virtual int feature_dim() const = 0;
    virtual int action_count() const = 0;
    virtual std::vector<double> reset(Rng& rng) = 0;
    virtual Step step(int action, Rng& rng) = 0;
};

struct TrainResult {
    std::vector<double> episode_returns;  // discounted, completed episodes only
    std::uint64_t env_steps = 0;
    std::uint64_t gradient_steps = 0;
};

// Runs total_steps environment steps with epsilon-greedy acting, replay,
// gradient steps and target syncs. Deterministic per seed.
TrainResult train(DqnAgent& agent, Environment& env, std::uint64_t total_steps, std::uint64_t seed);

}  // namespace adaptix
