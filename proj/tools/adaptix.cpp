// adaptix command-line entry point.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "adaptix/config.hpp"
#include "adaptix/datalog.hpp"
#include "adaptix/errors.hpp"
#include "adaptix/experiment.hpp"
#include "adaptix/service.hpp"

namespace fs = std::filesystem;
using namespace adaptix;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::string format;  // empty: command default
};

void add_common(CLI::App* cmd, Common& c, bool with_format) {
    cmd->add_option("--config", c.config, "JSON config file");
    cmd->add_option("--seed", c.seed, "run a single seed instead of the configured list");
    cmd->add_option("--out", c.out, "output directory")->capture_default_str();
    if (with_format) cmd->add_option("--format", c.format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
}

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : load_config(c.config);
    if (c.seed) cfg.seeds = {*c.seed};
    cfg.validate();
    return cfg;
}

fs::path out_dir(const Common& c) {
    fs::path dir(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

void progress(const RunResult& r) {
    const double sessions = static_cast<double>(r.train.sessions + r.eval.outcomes.size());
    std::fprintf(stderr, "%-24s seed=%-4llu ctr=%.4f rr=%.4f  %.0f sessions/s\n", r.label.c_str(),
                 static_cast<unsigned long long>(r.seed), r.eval.ctr, r.eval.rr,
                 r.seconds > 0 ? sessions / r.seconds : 0.0);
}

void write_report(const MetricsReport& report, const fs::path& dir, const std::string& stem, const std::string& format) {
    if (format.empty() || format == "csv") emit_report(report, ReportFormat::csv, dir / (stem + ".csv"));
    if (format.empty() || format == "markdown") emit_report(report, ReportFormat::markdown, dir / (stem + ".md"));
}

std::string eval_csv(const std::string& label, std::uint64_t seed, const EvalSummary& e) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%llu,%.6f,%.6f,%.6f,%.6f,%zu\n", label.c_str(),
                  static_cast<unsigned long long>(seed), e.ctr, e.rr, e.return_mean, e.ctr_impression,
                  e.outcomes.size());
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive UI layout generation with reinforcement learning"};
    app.require_subcommand(1);

    Common train_opts, eval_opts, cmp_opts, lr_opts, opt_opts, gen_opts, serve_opts;
    std::string train_log, eval_log, checkpoint, serve_checkpoint;

    auto* train = app.add_subcommand("train", "train the configured agent; writes agent.json and reward_curve.csv");
    add_common(train, train_opts, false);
    train->add_option("--log", train_log, "JSONL event log of every session");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate on held-out users; writes evaluation.csv");
    add_common(evaluate, eval_opts, false);
    evaluate->add_option("--checkpoint", checkpoint, "DQN checkpoint (default <out>/agent.json)");
    evaluate->add_option("--log", eval_log, "JSONL event log of evaluation sessions");

    auto* compare = app.add_subcommand("compare", "all methods; writes comparison.csv/.md and reward_curve.csv");
    add_common(compare, cmp_opts, true);

    auto* sweep_lr = app.add_subcommand("sweep-lr", "learning-rate sweep; writes sweep_lr.csv");
    add_common(sweep_lr, lr_opts, true);
    std::vector<double> rates = {0.005, 0.003, 0.002, 0.001};
    sweep_lr->add_option("--rates", rates, "learning rates")->capture_default_str();

    auto* sweep_opt = app.add_subcommand("sweep-optimizer", "optimizer sweep; writes sweep_optimizer.csv");
    add_common(sweep_opt, opt_opts, true);
    std::vector<std::string> opt_names = {"AdaGrad", "SGD", "Momentum", "Adam"};
    sweep_opt->add_option("--optimizers", opt_names, "optimizers")->capture_default_str();

    auto* gen = app.add_subcommand("generate-data", "synthetic interaction log; writes events.jsonl");
    add_common(gen, gen_opts, false);
    int gen_users = 100, gen_sessions = 25;
    std::string gen_policy = "random";
    gen->add_option("--users", gen_users)->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--sessions", gen_sessions, "sessions per user")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--policy", gen_policy)->capture_default_str()->check(CLI::IsMember({"random", "fixed_default"}));

    auto* serve = app.add_subcommand("serve", "HTTP session API (port from ADAPTIX_PORT, default 8080)");
    add_common(serve, serve_opts, false);
    HttpOptions http;
    std::string busy = "wait";
    std::size_t capacity = 1024;
    serve->add_option("--checkpoint", serve_checkpoint, "DQN checkpoint; trains one at startup when omitted");
    serve->add_option("--host", http.host)->capture_default_str();
    serve->add_option("--cors-origin", http.cors_origin)->capture_default_str();
    serve->add_option("--busy", busy, "concurrent post to a busy session: wait or reject")
        ->capture_default_str()
        ->check(CLI::IsMember({"wait", "reject"}));
    serve->add_option("--capacity", capacity)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*train) {
            const auto cfg = load(train_opts);
            const auto dir = out_dir(train_opts);
            const auto seed = cfg.seeds.front();
            std::optional<SessionLogger> logger;
            if (!train_log.empty()) logger.emplace(train_log, cfg.grid, cfg.users);
            SessionSink sink;
            if (logger) sink = [&](Phase p, const SessionRecord& r) { (*logger)(p, r); };

            auto shared = make_shared_dqn(cfg, seed);
            std::unique_ptr<LayoutPolicy> policy;
            if (cfg.agent == Method::dqn)
                policy = std::make_unique<DqnPolicy>(shared, cfg.grid, cfg.include_stats);
            else
                policy = make_policy(cfg.agent, cfg, seed);
            const auto t = train_policy(*policy, cfg, seed, sink);
            if (logger) logger->close();
            emit_reward_curve(t.episode_returns, dir / "reward_curve.csv");
            if (cfg.agent == Method::dqn) shared->agent.save(dir / "agent.json");
            std::fprintf(stderr, "trained %s: %zu episodes, %llu sessions\n", std::string(method_label(cfg.agent)).c_str(),
                         t.episode_returns.size(), static_cast<unsigned long long>(t.sessions));
        } else if (*evaluate) {
            const auto cfg = load(eval_opts);
            const auto dir = out_dir(eval_opts);
            std::optional<SessionLogger> logger;
            if (!eval_log.empty()) logger.emplace(eval_log, cfg.grid, 0);
            SessionSink sink;
            if (logger) sink = [&](Phase p, const SessionRecord& r) { (*logger)(p, r); };

            std::string csv = "method,seed,ctr,rr,return_mean,ctr_impression,sessions\n";
            const std::string label(method_label(cfg.agent));
            if (cfg.agent == Method::dqn) {
                const fs::path path = checkpoint.empty() ? dir / "agent.json" : fs::path(checkpoint);
                auto shared = std::make_shared<SharedDqn>(DqnAgent::load(path));
                DqnPolicy policy(shared, cfg.grid, cfg.include_stats);
                for (auto seed : cfg.seeds) csv += eval_csv(label, seed, evaluate_policy(policy, cfg, seed, sink));
            } else {
                for (auto seed : cfg.seeds) {
                    auto policy = make_policy(cfg.agent, cfg, seed);
                    train_policy(*policy, cfg, seed);
                    csv += eval_csv(label, seed, evaluate_policy(*policy, cfg, seed, sink));
                }
            }
            if (logger) logger->close();
            write_text_file(dir / "evaluation.csv", csv);
        } else if (*compare) {
            const auto cfg = load(cmp_opts);
            const auto dir = out_dir(cmp_opts);
            const auto report = run_comparison(cfg, comparison_methods(), progress);
            write_report(report, dir, "comparison", cmp_opts.format);
            for (std::size_t i = 0; i < report.rows.size(); ++i)
                if (report.rows[i].method == method_label(Method::dqn))
                    emit_reward_curve(report.curves[i].front(), dir / "reward_curve.csv");
        } else if (*sweep_lr) {
            const auto cfg = load(lr_opts);
            const auto dir = out_dir(lr_opts);
            write_report(sweep_learning_rate(cfg, rates, progress), dir, "sweep_lr",
                         lr_opts.format.empty() ? "csv" : lr_opts.format);
        } else if (*sweep_opt) {
            const auto cfg = load(opt_opts);
            const auto dir = out_dir(opt_opts);
            std::vector<OptimizerKind> opts;
            for (const auto& n : opt_names) {
                auto k = parse_optimizer(n);
                if (!k) throw ConfigError("unknown optimizer '" + n + "'");
                opts.push_back(*k);
            }
            write_report(sweep_optimizer(cfg, opts, progress), dir, "sweep_optimizer",
                         opt_opts.format.empty() ? "csv" : opt_opts.format);
        } else if (*gen) {
            const auto cfg = load(gen_opts);
            const auto dir = out_dir(gen_opts);
            const auto policy = gen_policy == "random" ? DatasetPolicy::random : DatasetPolicy::fixed_default;
            const auto records = generate_dataset(gen_users, gen_sessions, policy, cfg.seeds.front(), cfg);
            write_records(dir / "events.jsonl", records);
            std::fprintf(stderr, "wrote %zu records\n", records.size());
        } else if (*serve) {
            ServiceConfig sc;
            sc.experiment = load(serve_opts);
            sc.capacity = capacity;
            sc.busy = busy == "reject" ? BusyPolicy::reject : BusyPolicy::wait;
            std::shared_ptr<SharedDqn> shared;
            if (!serve_checkpoint.empty()) {
                shared = std::make_shared<SharedDqn>(DqnAgent::load(serve_checkpoint));
            } else {
                std::fprintf(stderr, "no checkpoint given; training a DQN agent first\n");
                shared = make_shared_dqn(sc.experiment, sc.experiment.seeds.front());
                DqnPolicy policy(shared, sc.experiment.grid, sc.experiment.include_stats);
                train_policy(policy, sc.experiment, sc.experiment.seeds.front());
            }
            SessionManager manager(sc, shared);
            http.port = port_from_env(8080);
            std::fprintf(stderr, "listening on %s:%d\n", http.host.c_str(), http.port);
            if (!run_http_server(manager, http)) throw IoError("cannot bind " + http.host + ":" + std::to_string(http.port));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
