#include "adaptix/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adaptix/errors.hpp"
#include "adaptix/metrics.hpp"

namespace adaptix {

namespace {

constexpr std::uint64_t kTrainStream = 0x747261696e;
constexpr std::uint64_t kEvalStream = 0x6576616c;
constexpr std::uint64_t kTrainEpisodes = 0x65703174;
constexpr std::uint64_t kEvalEpisodes = 0x65703265;
constexpr std::uint64_t kPolicyStream = 0x706f6c;

struct MethodName {
    Method method;
    std::string_view label;
    std::string_view short_name;
};

constexpr MethodName kMethods[] = {
    {Method::dqn, "Ours", "dqn"},
    {Method::mab, "MAB", "mab"},
    {Method::bayes_opt, "BayesianOptimization", "bayesopt"},
    {Method::mdp, "MDP", "mdp"},
    {Method::policy_gradient, "PolicyGradient", "pg"},
    {Method::collaborative, "CollaborativeFiltering", "cf"},
    {Method::random, "Random", "random"},
    {Method::fixed_default, "FixedDefault", "fixed_default"},
};

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

std::string_view method_label(Method m) {
    for (const auto& n : kMethods)
        if (n.method == m) return n.label;
    return "?";
}

std::optional<Method> parse_method(std::string_view s) {
    for (const auto& n : kMethods)
        if (n.label == s || n.short_name == s) return n.method;
    return std::nullopt;
}

std::vector<Method> comparison_methods() {
    return {Method::mab, Method::bayes_opt, Method::mdp, Method::policy_gradient, Method::collaborative,
            Method::dqn};
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m); };
    if (k < 2) fail("k must be >= 2");
    if (horizon < 1) fail("horizon must be positive");
    if (users < 1) fail("users must be positive");
    if (training_steps < 1) fail("training_steps must be positive");
    if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0,1]");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
    if (seeds.empty()) fail("seeds must not be empty");
    if (!(stats_alpha > 0.0 && stats_alpha <= 1.0)) fail("stats_alpha must lie in (0,1]");
    if (grid.cols < 2 || grid.fold_row < 1) fail("grid.cols must be >= 2 and grid.fold_row >= 1");
    if (persona_mix.explorer < 0 || persona_mix.scanner < 0 || persona_mix.loyalist < 0 ||
        !(persona_mix.explorer + persona_mix.scanner + persona_mix.loyalist > 0))
        fail("persona_mix weights must be non-negative with a positive sum");
    if (baseline.mab_arms < 1 || baseline.bo_evaluations < 1 || baseline.bo_candidates < 1 ||
        baseline.cf_neighbors < 1 || baseline.mdp_resolve_every < 1 || baseline.bo_initial_random < 1)
        fail("baseline counts must be positive");
    try {
        agent_config().validate();
    } catch (const InvalidArgument& e) {
        fail(e.what());
    }
}

AgentConfig ExperimentConfig::agent_config() const {
    AgentConfig a;
    a.gamma = gamma;
    a.epsilon = epsilon;
    a.batch_size = batch_size;
    a.min_replay = min_replay;
    a.replay_capacity = replay_capacity;
    a.target_sync_every = target_sync_every;
    a.hidden = hidden;
    a.optimizer = optimizer;
    a.learning_rate = learning_rate;
    return a;
}

PolicySetup ExperimentConfig::policy_setup(std::uint64_t seed) const {
    PolicySetup p;
    p.canonical = canonical_layout();
    p.grid = grid;
    p.include_stats = include_stats;
    p.gamma = gamma;
    p.budget_sessions = training_steps;
    p.seed = mix_seed(seed, kPolicyStream);
    p.learning_rate = learning_rate;
    p.optimizer = optimizer;
    p.epsilon = epsilon;
    p.mab_scope = baseline.mab_scope;
    p.bayes_opt_scope = baseline.bayes_opt_scope;
    p.cf_scope = baseline.cf_scope;
    p.mab_arms = baseline.mab_arms;
    p.bo_evaluations = baseline.bo_evaluations;
    p.bo_candidates = baseline.bo_candidates;
    p.bo_initial_random = baseline.bo_initial_random;
    p.cf_neighbors = baseline.cf_neighbors;
    p.mdp_resolve_every = baseline.mdp_resolve_every;
    return p;
}

EpisodeResult run_episode(LayoutPolicy& policy, const Persona& persona, const ExperimentConfig& cfg, Rng& rng,
                          std::uint64_t max_sessions, std::uint64_t user) {
    EpisodeResult result;
    LayoutState s = cfg.canonical_layout();
    auto stats = InteractionStats::zero(cfg.k, cfg.horizon);
    std::vector<double> rewards;
    policy.begin_episode();
    for (int t = 0; t < cfg.horizon && result.sessions.size() < max_sessions; ++t) {
        LayoutState shown = policy.next_layout(s, stats, rng);
        const PlacedLayout placed = pack(shown, cfg.grid);
        SessionOutcome outcome = simulate_session(persona, placed, shown, rng, cfg.user_model);
        const double r = reward_from_outcome(outcome, cfg.reward_weights);
        stats.record(shown, outcome.clicks, outcome.dwell_norm, cfg.stats_alpha);
        const bool done = !outcome.retained || t == cfg.horizon - 1;
        policy.observe(SessionFeedback{shown, outcome, r, stats, done});

        rewards.push_back(r);
        const bool retained = outcome.retained;
        result.sessions.push_back(
            SessionRecord{user, t, shown, std::move(outcome), r, policy.last_action()});
        s = std::move(shown);
        if (!retained) break;
    }
    policy.end_episode();
    result.discounted_return = discounted_return(rewards, cfg.gamma);
    return result;
}

Persona training_persona(const ExperimentConfig& cfg, std::uint64_t seed, std::uint64_t user) {
    return sample_persona(cfg.persona_mix, mix_seed(mix_seed(seed, kTrainStream), user));
}

Persona heldout_persona(const ExperimentConfig& cfg, std::uint64_t seed, std::uint64_t user) {
    return sample_persona(cfg.persona_mix, mix_seed(mix_seed(seed, kEvalStream), user));
}

std::shared_ptr<SharedDqn> make_shared_dqn(const ExperimentConfig& cfg, std::uint64_t seed) {
    DqnAgent agent(feature_length(cfg.k), action_count(cfg.k), cfg.agent_config(),
                   mix_seed(seed, kPolicyStream));
    agent.set_schedule_length(cfg.training_steps);
    return std::make_shared<SharedDqn>(std::move(agent));
}

std::unique_ptr<LayoutPolicy> make_policy(Method m, const ExperimentConfig& cfg, std::uint64_t seed) {
    const PolicySetup setup = cfg.policy_setup(seed);
    switch (m) {
        case Method::dqn:
            return std::make_unique<DqnPolicy>(make_shared_dqn(cfg, seed), cfg.grid, cfg.include_stats);
        case Method::mab: return std::make_unique<MabPolicy>(setup);
        case Method::bayes_opt: return std::make_unique<BayesOptPolicy>(setup);
        case Method::mdp: return std::make_unique<MdpPolicy>(setup);
        case Method::policy_gradient: return std::make_unique<PgPolicy>(setup);
        case Method::collaborative: return std::make_unique<CfPolicy>(setup);
        case Method::random: return std::make_unique<RandomPolicy>();
        case Method::fixed_default: return std::make_unique<FixedPolicy>(setup.canonical);
    }
    throw InvalidArgument("unknown method");
}

TrainSummary train_policy(LayoutPolicy& policy, const ExperimentConfig& cfg, std::uint64_t seed,
                          const SessionSink& sink) {
    TrainSummary out;
    policy.set_training(true);
    for (std::uint64_t episode = 0; out.sessions < cfg.training_steps; ++episode) {
        const std::uint64_t user = episode % static_cast<std::uint64_t>(cfg.users);
        const Persona persona = training_persona(cfg, seed, user);
        Rng rng(mix_seed(mix_seed(seed, kTrainEpisodes), episode));
        auto ep = run_episode(policy, persona, cfg, rng, cfg.training_steps - out.sessions, user);
        out.sessions += ep.sessions.size();
        out.episode_returns.push_back(ep.discounted_return);
        if (sink)
            for (const auto& rec : ep.sessions) sink(Phase::train, rec);
    }
    policy.set_training(false);
    return out;
}

EvalSummary evaluate_policy(LayoutPolicy& policy, const ExperimentConfig& cfg, std::uint64_t seed,
                            const SessionSink& sink) {
    EvalSummary out;
    policy.set_training(false);
    std::uint64_t impressions = 0, clicks = 0;
    for (std::uint64_t user = 0; user < static_cast<std::uint64_t>(cfg.users); ++user) {
        const Persona persona = heldout_persona(cfg, seed, user);
        Rng rng(mix_seed(mix_seed(seed, kEvalEpisodes), user));
        auto ep = run_episode(policy, persona, cfg, rng, UINT64_MAX, user);
        out.episode_returns.push_back(ep.discounted_return);
        for (auto& rec : ep.sessions) {
            if (sink) sink(Phase::eval, rec);
            impressions += rec.outcome.clicks.size();
            clicks += static_cast<std::uint64_t>(rec.outcome.click_count);
            out.outcomes.push_back(std::move(rec.outcome));
        }
    }
    out.ctr = compute_ctr(out.outcomes);
    out.rr = compute_rr(out.outcomes);
    out.ctr_impression = impressions ? static_cast<double>(clicks) / static_cast<double>(impressions) : 0.0;
    out.return_mean = mean_of(out.episode_returns);
    return out;
}

RunResult run_method(Method m, const ExperimentConfig& cfg, std::uint64_t seed, const SessionSink& sink) {
    const auto start = std::chrono::steady_clock::now();
    auto policy = make_policy(m, cfg, seed);
    RunResult r;
    r.label = std::string(method_label(m));
    r.seed = seed;
    r.train = train_policy(*policy, cfg, seed, sink);
    r.eval = evaluate_policy(*policy, cfg, seed, sink);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

ReportRow summarize(std::string label, const std::vector<RunResult>& runs, bool record_throughput) {
    ReportRow row;
    row.method = std::move(label);
    std::vector<double> ctr, rr, ret, imp, rate;
    for (const auto& r : runs) {
        ctr.push_back(r.eval.ctr);
        rr.push_back(r.eval.rr);
        ret.push_back(r.eval.return_mean);
        imp.push_back(r.eval.ctr_impression);
        const double sessions = static_cast<double>(r.train.sessions + r.eval.outcomes.size());
        if (r.seconds > 0) rate.push_back(sessions / r.seconds);
        row.train_sessions = std::max(row.train_sessions, r.train.sessions);
    }
    row.ctr_mean = mean_of(ctr);
    row.ctr_std = sample_std(ctr);
    row.rr_mean = mean_of(rr);
    row.rr_std = sample_std(rr);
    row.return_mean = mean_of(ret);
    row.ctr_impression_mean = mean_of(imp);
    if (record_throughput && !rate.empty()) row.sessions_per_sec = mean_of(rate);
    return row;
}

namespace {

void append_runs(MetricsReport& report, const std::string& label, const ExperimentConfig& cfg, Method m,
                 const RunObserver& observer) {
    std::vector<RunResult> runs;
    std::vector<std::vector<double>> curves;
    for (std::uint64_t seed : cfg.seeds) {
        runs.push_back(run_method(m, cfg, seed));
        runs.back().label = label;
        if (observer) observer(runs.back());
        curves.push_back(runs.back().train.episode_returns);
    }
    report.rows.push_back(summarize(label, runs, cfg.record_throughput));
    report.curves.push_back(std::move(curves));
}

}  // namespace

MetricsReport run_comparison(const ExperimentConfig& cfg, const std::vector<Method>& methods,
                             const RunObserver& observer) {
    cfg.validate();
    std::vector<Method> sorted = methods;
    std::sort(sorted.begin(), sorted.end(),
              [](Method a, Method b) { return method_label(a) < method_label(b); });
    MetricsReport report;
    for (Method m : sorted) append_runs(report, std::string(method_label(m)), cfg, m, observer);
    return report;
}

MetricsReport sweep_learning_rate(const ExperimentConfig& cfg, const std::vector<double>& rates,
                                  const RunObserver& observer) {
    if (rates.empty()) throw InvalidArgument("learning-rate sweep needs at least one rate");
    MetricsReport report;
    for (double lr : rates) {
        if (!(lr > 0.0)) throw InvalidArgument("learning rates must be positive");
        ExperimentConfig c = cfg;
        c.learning_rate = lr;
        c.validate();
        append_runs(report, fmt("Lr=%g", lr), c, Method::dqn, observer);
    }
    return report;
}

MetricsReport sweep_optimizer(const ExperimentConfig& cfg, const std::vector<OptimizerKind>& opts,
                              const RunObserver& observer) {
    if (opts.empty()) throw InvalidArgument("optimizer sweep needs at least one optimizer");
    MetricsReport report;
    for (OptimizerKind o : opts) {
        ExperimentConfig c = cfg;
        c.optimizer = o;
        c.validate();
        append_runs(report, std::string(to_string(o)), c, Method::dqn, observer);
    }
    return report;
}

std::string format_report(const MetricsReport& report, ReportFormat format) {
    static const char* kColumns[] = {"method",      "ctr_mean",         "ctr_std",
                                     "rr_mean",     "rr_std",           "return_mean",
                                     "sessions_per_sec", "ctr_impression_mean", "train_sessions"};
    auto cells = [](const ReportRow& r) {
        return std::vector<std::string>{r.method,
                                        fmt("%.6f", r.ctr_mean),
                                        fmt("%.6f", r.ctr_std),
                                        fmt("%.6f", r.rr_mean),
                                        fmt("%.6f", r.rr_std),
                                        fmt("%.6f", r.return_mean),
                                        r.sessions_per_sec ? fmt("%.1f", *r.sessions_per_sec) : "NA",
                                        fmt("%.6f", r.ctr_impression_mean),
                                        std::to_string(r.train_sessions)};
    };
    std::ostringstream os;
    if (format == ReportFormat::csv) {
        for (std::size_t i = 0; i < std::size(kColumns); ++i) os << (i ? "," : "") << kColumns[i];
        os << '\n';
        for (const auto& r : report.rows) {
            const auto c = cells(r);
            for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
            os << '\n';
        }
    } else {
        os << '|';
        for (const char* c : kColumns) os << ' ' << c << " |";
        os << "\n|";
        for (std::size_t i = 0; i < std::size(kColumns); ++i) os << (i ? "---:|" : "---|");
        os << '\n';
        for (const auto& r : report.rows) {
            os << '|';
            for (const auto& c : cells(r)) os << ' ' << c << " |";
            os << '\n';
        }
    }
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("failed writing " + path.string());
}

void emit_report(const MetricsReport& report, ReportFormat format, const std::filesystem::path& path) {
    write_text_file(path, format_report(report, format));
}

std::string format_reward_curve(std::span<const double> returns) {
    std::ostringstream os;
    os << "episode,return,moving_avg_100\n";
    const auto ma = moving_average(returns, 100);
    for (std::size_t e = 0; e < returns.size(); ++e)
        os << e << ',' << fmt("%.17g", returns[e]) << ',' << fmt("%.17g", ma[e]) << '\n';
    return os.str();
}

void emit_reward_curve(std::span<const double> returns, const std::filesystem::path& path) {
    write_text_file(path, format_reward_curve(returns));
}

}  // namespace adaptix
