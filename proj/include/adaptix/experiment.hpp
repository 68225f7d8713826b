#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adaptix/baselines/policies.hpp"
#include "adaptix/dqn.hpp"
#include "adaptix/dqn_policy.hpp"
#include "adaptix/layout.hpp"
#include "adaptix/policy.hpp"
#include "adaptix/user_sim.hpp"

namespace adaptix {

enum class Method { dqn, mab, bayes_opt, mdp, policy_gradient, collaborative, random, fixed_default };

// Report label, e.g. "Ours", "BayesianOptimization".
std::string_view method_label(Method m);
// Accepts report labels and the short service names (dqn, mab, bayesopt, mdp, pg, cf, random,
// fixed_default).
std::optional<Method> parse_method(std::string_view s);
// The six methods compared in the main report.
std::vector<Method> comparison_methods();

struct BaselineConfig {
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

struct ExperimentConfig {
    Method agent = Method::dqn;
    int k = 8;
    int horizon = 25;
    int users = 200;
    std::uint64_t training_steps = 30000;  // simulated training sessions per run
    double gamma = 0.95;
    double learning_rate = 0.001;
    OptimizerKind optimizer = OptimizerKind::adam;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    RewardWeights reward_weights;
    PersonaMix persona_mix;
    UserModelConfig user_model;
    GridConfig grid;
    bool include_stats = true;
    double stats_alpha = 0.3;
    std::uint64_t layout_seed = 7;

    // DQN knobs beyond gamma / learning rate / optimizer.
    EpsilonSchedule epsilon;
    int batch_size = 64;
    std::size_t min_replay = 500;
    std::size_t replay_capacity = 20000;
    int target_sync_every = 250;
    std::vector<int> hidden = {64, 64};

    BaselineConfig baseline;
    // Wall-clock throughput breaks byte-identical reports, so it is off by default.
    bool record_throughput = false;

    void validate() const;  // throws ConfigError
    AgentConfig agent_config() const;
    PolicySetup policy_setup(std::uint64_t seed) const;
    LayoutState canonical_layout() const { return new_default_layout(k, layout_seed); }
};

enum class Phase { train, eval };

struct SessionRecord {
    std::uint64_t user = 0;     // persona index within its population
    int step = 0;               // session index within the episode
    LayoutState shown;
    SessionOutcome outcome;
    double reward = 0.0;
    int action = -1;
};

struct EpisodeResult {
    std::vector<SessionRecord> sessions;
    double discounted_return = 0.0;
};

// Called after every simulated session.
using SessionSink = std::function<void(Phase, const SessionRecord&)>;

// One user's episode: up to horizon sessions from the canonical layout, ending
// early on churn or when max_sessions is reached.
EpisodeResult run_episode(LayoutPolicy& policy, const Persona& persona, const ExperimentConfig& cfg,
                          Rng& rng, std::uint64_t max_sessions = UINT64_MAX,
                          std::uint64_t user = 0);

// Persona populations: training personas and a disjoint held-out set.
Persona training_persona(const ExperimentConfig& cfg, std::uint64_t seed, std::uint64_t user);
Persona heldout_persona(const ExperimentConfig& cfg, std::uint64_t seed, std::uint64_t user);

std::unique_ptr<LayoutPolicy> make_policy(Method m, const ExperimentConfig& cfg, std::uint64_t seed);
std::shared_ptr<SharedDqn> make_shared_dqn(const ExperimentConfig& cfg, std::uint64_t seed);

struct TrainSummary {
    std::vector<double> episode_returns;  // discounted, in training order
    std::uint64_t sessions = 0;
};

struct EvalSummary {
    std::vector<SessionOutcome> outcomes;
    std::vector<double> episode_returns;
    double ctr = 0.0;
    double ctr_impression = 0.0;
    double rr = 0.0;
    double return_mean = 0.0;
};

// Cycles through the training population until cfg.training_steps sessions.
TrainSummary train_policy(LayoutPolicy& policy, const ExperimentConfig& cfg, std::uint64_t seed,
                          const SessionSink& sink = {});
// One frozen-policy episode per held-out persona.
EvalSummary evaluate_policy(LayoutPolicy& policy, const ExperimentConfig& cfg, std::uint64_t seed,
                            const SessionSink& sink = {});

struct RunResult {
    std::string label;
    std::uint64_t seed = 0;
    TrainSummary train;
    EvalSummary eval;
    double seconds = 0.0;
};

RunResult run_method(Method m, const ExperimentConfig& cfg, std::uint64_t seed, const SessionSink& sink = {});

struct ReportRow {
    std::string method;
    double ctr_mean = 0.0, ctr_std = 0.0;
    double rr_mean = 0.0, rr_std = 0.0;
    double return_mean = 0.0;
    std::optional<double> sessions_per_sec;
    double ctr_impression_mean = 0.0;
    std::uint64_t train_sessions = 0;  // per seed
};

struct MetricsReport {
    std::vector<ReportRow> rows;
    // Training-episode returns per (row label, seed), in row order.
    std::vector<std::vector<std::vector<double>>> curves;
};

// Mean and sample standard deviation over seeds.
ReportRow summarize(std::string label, const std::vector<RunResult>& runs, bool record_throughput);

// Notified after each (method, seed) run, e.g. for progress output.
using RunObserver = std::function<void(const RunResult&)>;

// Rows sorted by method name.
MetricsReport run_comparison(const ExperimentConfig& cfg, const std::vector<Method>& methods = comparison_methods(),
                             const RunObserver& observer = {});
// Rows in the given order, labelled "Lr=<rate>".
MetricsReport sweep_learning_rate(const ExperimentConfig& cfg,
                                  const std::vector<double>& rates = {0.005, 0.003, 0.002, 0.001},
                                  const RunObserver& observer = {});
MetricsReport sweep_optimizer(const ExperimentConfig& cfg,
                              const std::vector<OptimizerKind>& opts = {OptimizerKind::adagrad, OptimizerKind::sgd,
                                                                        OptimizerKind::momentum,
                                                                        OptimizerKind::adam},
                              const RunObserver& observer = {});

enum class ReportFormat { csv, markdown };
std::string format_report(const MetricsReport& report, ReportFormat format);
// Throws IoError when the file cannot be written.
void emit_report(const MetricsReport& report, ReportFormat format, const std::filesystem::path& path);

std::string format_reward_curve(std::span<const double> returns);
void emit_reward_curve(std::span<const double> returns, const std::filesystem::path& path);

// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace adaptix
