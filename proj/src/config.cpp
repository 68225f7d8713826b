#include "adaptix/config.hpp"

#include <fstream>
#include <set>
#include <string>

#include "adaptix/errors.hpp"

namespace adaptix {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where.empty() ? "config must be an object" : where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!ok.contains(key)) throw ConfigError("unknown config key '" + (where.empty() ? key : where + "." + key) + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + (where.empty() ? std::string(key) : where + "." + key) +
                          "' has the wrong type");
    }
}

BaselineScope read_scope(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
    auto s = parse_scope(v.get<std::string>());
    if (!s) throw ConfigError("config key '" + key + "' must be population or per_user");
    return *s;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    reject_unknown(j, "",
                   {"agent", "k", "horizon", "users", "training_steps", "gamma", "learning_rate", "optimizer",
                    "seeds", "reward_weights", "persona_mix", "prominence_multiplier", "grid", "include_stats",
                    "stats_alpha", "layout_seed", "epsilon", "batch_size", "min_replay", "replay_capacity",
                    "target_sync_every", "hidden", "baseline", "record_throughput"});
    ExperimentConfig c;
    if (j.contains("agent")) {
        std::string a;
        read(j, "agent", a, "");
        auto m = parse_method(a);
        if (!m) throw ConfigError("unknown agent '" + a + "'");
        c.agent = *m;
    }
    read(j, "k", c.k, "");
    read(j, "horizon", c.horizon, "");
    read(j, "users", c.users, "");
    read(j, "training_steps", c.training_steps, "");
    read(j, "gamma", c.gamma, "");
    read(j, "learning_rate", c.learning_rate, "");
    if (j.contains("optimizer")) {
        std::string o;
        read(j, "optimizer", o, "");
        auto k = parse_optimizer(o);
        if (!k) throw ConfigError("unknown optimizer '" + o + "'");
        c.optimizer = *k;
    }
    read(j, "seeds", c.seeds, "");
    if (j.contains("reward_weights")) {
        const auto& w = j.at("reward_weights");
        reject_unknown(w, "reward_weights", {"w_click", "w_dwell", "w_retain"});
        read(w, "w_click", c.reward_weights.w_click, "reward_weights");
        read(w, "w_dwell", c.reward_weights.w_dwell, "reward_weights");
        read(w, "w_retain", c.reward_weights.w_retain, "reward_weights");
    }
    if (j.contains("persona_mix")) {
        const auto& m = j.at("persona_mix");
        reject_unknown(m, "persona_mix", {"explorer", "scanner", "loyalist"});
        read(m, "explorer", c.persona_mix.explorer, "persona_mix");
        read(m, "scanner", c.persona_mix.scanner, "persona_mix");
        read(m, "loyalist", c.persona_mix.loyalist, "persona_mix");
    }
    read(j, "prominence_multiplier", c.user_model.prominence_multiplier, "");
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        reject_unknown(g, "grid", {"cols", "fold_row"});
        read(g, "cols", c.grid.cols, "grid");
        read(g, "fold_row", c.grid.fold_row, "grid");
    }
    read(j, "include_stats", c.include_stats, "");
    read(j, "stats_alpha", c.stats_alpha, "");
    read(j, "layout_seed", c.layout_seed, "");
    if (j.contains("epsilon")) {
        const auto& e = j.at("epsilon");
        reject_unknown(e, "epsilon", {"start", "end", "fraction"});
        read(e, "start", c.epsilon.start, "epsilon");
        read(e, "end", c.epsilon.end, "epsilon");
        read(e, "fraction", c.epsilon.fraction, "epsilon");
    }
    read(j, "batch_size", c.batch_size, "");
    read(j, "min_replay", c.min_replay, "");
    read(j, "replay_capacity", c.replay_capacity, "");
    read(j, "target_sync_every", c.target_sync_every, "");
    read(j, "hidden", c.hidden, "");
    if (j.contains("baseline")) {
        const auto& b = j.at("baseline");
        reject_unknown(b, "baseline",
                       {"scope", "mab_scope", "bayes_opt_scope", "cf_scope", "mab_arms", "bo_evaluations",
                        "bo_candidates", "bo_initial_random", "cf_neighbors", "mdp_resolve_every"});
        auto& bl = c.baseline;
        // "scope" applies to the population-capable baselines; per-method keys override it.
        if (b.contains("scope")) {
            const auto s = read_scope(b.at("scope"), "baseline.scope");
            bl.mab_scope = bl.bayes_opt_scope = bl.cf_scope = s;
        }
        if (b.contains("mab_scope")) bl.mab_scope = read_scope(b.at("mab_scope"), "baseline.mab_scope");
        if (b.contains("bayes_opt_scope"))
            bl.bayes_opt_scope = read_scope(b.at("bayes_opt_scope"), "baseline.bayes_opt_scope");
        if (b.contains("cf_scope")) bl.cf_scope = read_scope(b.at("cf_scope"), "baseline.cf_scope");
        read(b, "mab_arms", bl.mab_arms, "baseline");
        read(b, "bo_evaluations", bl.bo_evaluations, "baseline");
        read(b, "bo_candidates", bl.bo_candidates, "baseline");
        read(b, "bo_initial_random", bl.bo_initial_random, "baseline");
        read(b, "cf_neighbors", bl.cf_neighbors, "baseline");
        read(b, "mdp_resolve_every", bl.mdp_resolve_every, "baseline");
    }
    read(j, "record_throughput", c.record_throughput, "");
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    if (ext == ".toml") throw ConfigError("TOML configs are not supported; use JSON");
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(f);
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const ExperimentConfig& c) {
    return {
        {"agent", std::string(method_label(c.agent))},
        {"k", c.k},
        {"horizon", c.horizon},
        {"users", c.users},
        {"training_steps", c.training_steps},
        {"gamma", c.gamma},
        {"learning_rate", c.learning_rate},
        {"optimizer", std::string(to_string(c.optimizer))},
        {"seeds", c.seeds},
        {"reward_weights",
         {{"w_click", c.reward_weights.w_click},
          {"w_dwell", c.reward_weights.w_dwell},
          {"w_retain", c.reward_weights.w_retain}}},
        {"persona_mix",
         {{"explorer", c.persona_mix.explorer},
          {"scanner", c.persona_mix.scanner},
          {"loyalist", c.persona_mix.loyalist}}},
        {"prominence_multiplier", c.user_model.prominence_multiplier},
        {"grid", {{"cols", c.grid.cols}, {"fold_row", c.grid.fold_row}}},
        {"include_stats", c.include_stats},
        {"stats_alpha", c.stats_alpha},
        {"layout_seed", c.layout_seed},
        {"epsilon", {{"start", c.epsilon.start}, {"end", c.epsilon.end}, {"fraction", c.epsilon.fraction}}},
        {"batch_size", c.batch_size},
        {"min_replay", c.min_replay},
        {"replay_capacity", c.replay_capacity},
        {"target_sync_every", c.target_sync_every},
        {"hidden", c.hidden},
        {"baseline",
         {{"mab_scope", std::string(to_string(c.baseline.mab_scope))},
          {"bayes_opt_scope", std::string(to_string(c.baseline.bayes_opt_scope))},
          {"cf_scope", std::string(to_string(c.baseline.cf_scope))},
          {"mab_arms", c.baseline.mab_arms},
          {"bo_evaluations", c.baseline.bo_evaluations},
          {"bo_candidates", c.baseline.bo_candidates},
          {"bo_initial_random", c.baseline.bo_initial_random},
          {"cf_neighbors", c.baseline.cf_neighbors},
          {"mdp_resolve_every", c.baseline.mdp_resolve_every}}},
        {"record_throughput", c.record_throughput},
    };
}

}  // namespace adaptix
