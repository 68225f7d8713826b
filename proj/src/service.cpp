#include "adaptix/service.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "adaptix/errors.hpp"
#include "adaptix/metrics.hpp"

namespace adaptix {

using nlohmann::json;

struct SessionManager::Session {
    std::string id;
    bool simulated = false;
    Method method = Method::dqn;
    bool online_learning = false;
    std::unique_ptr<LayoutPolicy> policy;
    Rng rng{0};
    LayoutState current;
    InteractionStats stats;
    std::optional<Persona> persona;
    std::int64_t step = 0;
    std::vector<SessionOutcome> outcomes;
    double reward_sum = 0.0;
    std::mutex mutex;
};

ApiResponse error_response(int status, const std::string& message, const std::string& field) {
    json body{{"error", message}};
    if (!field.empty()) body["field"] = field;
    return {status, std::move(body)};
}

SessionManager::SessionManager(ServiceConfig cfg, std::shared_ptr<SharedDqn> dqn)
    : cfg_(std::move(cfg)), dqn_(std::move(dqn)) {
    cfg_.experiment.validate();
    if (!dqn_) dqn_ = make_shared_dqn(cfg_.experiment, cfg_.experiment.seeds.front());
    if (dqn_->agent.input_dim() != feature_length(cfg_.experiment.k) ||
        dqn_->agent.action_count() != action_count(cfg_.experiment.k))
        throw InvalidArgument("agent dimensions do not match the configured component count");
}

json SessionManager::layout_doc(const LayoutState& s) const { return serialize_layout(pack(s, cfg_.experiment.grid), s); }

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionManager::session_count() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

ApiResponse SessionManager::create_session(const json& body) {
    if (!body.is_object()) return error_response(400, "request body must be a JSON object");
    const auto& ec = cfg_.experiment;
    auto s = std::make_shared<Session>();

    const std::string mode = body.contains("mode") && body["mode"].is_string() ? body["mode"].get<std::string>() : "";
    if (mode != "live" && mode != "simulated") return error_response(400, "mode must be live or simulated", "mode");
    s->simulated = mode == "simulated";

    if (!body.contains("agent") || !body["agent"].is_string()) return error_response(400, "agent is required", "agent");
    const std::string agent = body["agent"].get<std::string>();
    const auto method = parse_method(agent);
    if (!method || *method == Method::fixed_default)
        return error_response(400, "unknown agent '" + agent + "'", "agent");
    s->method = *method;

    if (body.contains("online_learning")) {
        if (!body["online_learning"].is_boolean()) return error_response(400, "online_learning must be a boolean", "online_learning");
        s->online_learning = body["online_learning"].get<bool>();
    }

    std::uint64_t seed;
    {
        std::lock_guard lock(mutex_);
        if (sessions_.size() >= cfg_.capacity) return error_response(503, "session capacity reached");
        seed = next_id_;
        char buf[32];
        std::snprintf(buf, sizeof buf, "s%llu", static_cast<unsigned long long>(next_id_++));
        s->id = buf;
    }
    if (body.contains("seed") && !body["seed"].is_null()) {
        if (!body["seed"].is_number_integer()) return error_response(400, "seed must be an integer", "seed");
        seed = body["seed"].get<std::uint64_t>();
    }

    if (s->method == Method::dqn)
        s->policy = std::make_unique<DqnPolicy>(dqn_, ec.grid, ec.include_stats, cfg_.live_epsilon);
    else
        s->policy = make_policy(s->method, ec, seed);
    s->policy->set_training(s->online_learning);
    s->rng = Rng(mix_seed(seed, 0x5e55));
    if (s->simulated) s->persona = sample_persona(ec.persona_mix, mix_seed(seed, 0x9e25));
    s->stats = InteractionStats::zero(ec.k, ec.horizon);
    s->policy->begin_episode();
    s->current = s->policy->next_layout(ec.canonical_layout(), s->stats, s->rng);

    json out{{"session_id", s->id}, {"layout", layout_doc(s->current)}};
    {
        std::lock_guard lock(mutex_);
        if (sessions_.size() >= cfg_.capacity) return error_response(503, "session capacity reached");
        sessions_.emplace(s->id, s);
    }
    return {201, std::move(out)};
}

ApiResponse SessionManager::get_layout(const std::string& id) {
    auto s = find(id);
    if (!s) return error_response(404, "unknown session");
    std::lock_guard lock(s->mutex);
    return {200, layout_doc(s->current)};
}

namespace {

// Validates a live-mode body against the shown layout.
std::optional<ApiResponse> live_outcome(const json& body, const LayoutState& shown, SessionOutcome& o) {
    if (!body.is_object()) return error_response(400, "request body must be a JSON object");
    if (!body.contains("clicks") || !body["clicks"].is_array())
        return error_response(422, "clicks must be an array of component ids", "clicks");
    if (!body.contains("dwell_norm") || !body["dwell_norm"].is_number())
        return error_response(422, "dwell_norm must be a number", "dwell_norm");
    if (!body.contains("returned") || !body["returned"].is_boolean())
        return error_response(422, "returned must be a boolean", "returned");
    const double dwell = body["dwell_norm"].get<double>();
    if (!(dwell >= 0.0 && dwell <= 1.0)) return error_response(422, "dwell_norm must lie in [0,1]", "dwell_norm");

    o.clicks.assign(shown.components.size(), false);
    for (const auto& c : body["clicks"]) {
        if (!c.is_number_integer()) return error_response(422, "click ids must be integers", "clicks");
        const int pos = shown.position_of(c.get<int>());
        if (pos < 0) return error_response(422, "click id not in layout", "clicks");
        if (o.clicks[pos]) return error_response(422, "duplicate click id", "clicks");
        o.clicks[pos] = true;
        ++o.click_count;
    }
    o.dwell_norm = dwell;
    o.retained = body["returned"].get<bool>();
    o.satisfaction = o.click_count + 0.5 * o.dwell_norm;
    return std::nullopt;
}

}  // namespace

ApiResponse SessionManager::post_events(const std::string& id, const json& body) {
    auto s = find(id);
    if (!s) return error_response(404, "unknown session");
    std::unique_lock lock(s->mutex, std::defer_lock);
    if (cfg_.busy == BusyPolicy::reject) {
        if (!lock.try_lock()) return error_response(409, "session is busy");
    } else {
        lock.lock();
    }
    const auto& ec = cfg_.experiment;

    SessionOutcome outcome;
    if (s->simulated) {
        if (!body.is_null() && !(body.is_object() && body.empty()))
            return error_response(400, "simulated sessions take an empty body");
        outcome = simulate_session(*s->persona, pack(s->current, ec.grid), s->current, s->rng, ec.user_model);
    } else if (auto err = live_outcome(body, s->current, outcome)) {
        return *err;
    }

    const double reward = reward_from_outcome(outcome, ec.reward_weights);
    s->stats.record(s->current, outcome.clicks, outcome.dwell_norm, ec.stats_alpha);
    s->policy->observe(SessionFeedback{s->current, outcome, reward, s->stats, !outcome.retained});
    s->current = s->policy->next_layout(s->current, s->stats, s->rng);
    s->outcomes.push_back(std::move(outcome));
    s->reward_sum += reward;
    ++s->step;

    json out{{"reward", reward}, {"layout", layout_doc(s->current)}, {"step", s->step}};
    out["action"] = s->policy->last_action() >= 0 ? json(s->policy->last_action()) : json(nullptr);
    return {200, std::move(out)};
}

ApiResponse SessionManager::get_metrics(const std::string& id) {
    auto s = find(id);
    if (!s) return error_response(404, "unknown session");
    std::lock_guard lock(s->mutex);
    json out{{"steps", s->step}};
    if (s->outcomes.empty()) {
        out["ctr"] = nullptr;
        out["rr_estimate"] = nullptr;
        out["mean_reward"] = nullptr;
    } else {
        out["ctr"] = compute_ctr(s->outcomes);
        out["rr_estimate"] = compute_rr(s->outcomes);
        out["mean_reward"] = s->reward_sum / static_cast<double>(s->outcomes.size());
    }
    return {200, std::move(out)};
}

ApiResponse SessionManager::delete_session(const std::string& id) {
    std::shared_ptr<Session> s;
    {
        std::lock_guard lock(mutex_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end()) return error_response(404, "unknown session");
        s = std::move(it->second);
        sessions_.erase(it);
    }
    std::lock_guard lock(s->mutex);  // let an in-flight post finish
    return {204, nullptr};
}

}  // namespace adaptix
