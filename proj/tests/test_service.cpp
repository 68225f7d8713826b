#include <thread>

#include "adaptix/service.hpp"
#include "doctest.h"

using namespace adaptix;
using nlohmann::json;

namespace {

ServiceConfig service_config(std::size_t capacity = 1024) {
    ServiceConfig c;
    c.capacity = capacity;
    return c;
}

std::string create(SessionManager& m, json body) {
    const auto r = m.create_session(body);
    REQUIRE(r.status == 201);
    return r.body["session_id"].get<std::string>();
}

LayoutState layout_of(const json& doc) { return deserialize_layout(doc); }

json live_event(std::vector<int> clicks, double dwell, bool returned) {
    return {{"clicks", clicks}, {"dwell_norm", dwell}, {"returned", returned}};
}

}  // namespace

TEST_SUITE("service") {

TEST_CASE("session creation") {
    SessionManager m(service_config());
    const auto r = m.create_session({{"mode", "live"}, {"agent", "dqn"}});
    CHECK(r.status == 201);
    CHECK(r.body["layout"]["components"].size() == 8u);
    CHECK(r.body["session_id"].is_string());

    const auto bad = m.create_session({{"mode", "live"}, {"agent", "frobnicate"}});
    CHECK(bad.status == 400);
    CHECK(bad.body["field"] == "agent");
    CHECK(m.create_session({{"mode", "sideways"}, {"agent", "dqn"}}).status == 400);
    CHECK(m.create_session({{"agent", "dqn"}}).status == 400);
    CHECK(m.create_session(json::array()).status == 400);
    CHECK(m.create_session({{"mode", "live"}, {"agent", "dqn"}, {"seed", "x"}}).status == 400);
    CHECK(m.create_session({{"mode", "live"}, {"agent", "dqn"}, {"online_learning", 1}}).status == 400);

    for (const char* agent : {"mab", "bayesopt", "mdp", "pg", "cf", "random"})
        CHECK(m.create_session({{"mode", "simulated"}, {"agent", agent}}).status == 201);
}

TEST_CASE("same seed gives the same initial layout") {
    SessionManager m(service_config());
    const json body{{"mode", "simulated"}, {"agent", "dqn"}, {"seed", 42}};
    const auto a = m.create_session(body), b = m.create_session(body);
    CHECK(a.body["layout"] == b.body["layout"]);
    CHECK(a.body["session_id"] != b.body["session_id"]);
}

TEST_CASE("layout reads and event posts") {
    SessionManager m(service_config());
    const auto created = m.create_session({{"mode", "live"}, {"agent", "random"}, {"seed", 3}});
    const std::string id = created.body["session_id"];
    CHECK(m.get_layout(id).body == created.body["layout"]);
    CHECK(m.get_layout("nope").status == 404);
    CHECK(m.post_events("nope", live_event({}, 0, true)).status == 404);

    const auto before = layout_of(m.get_layout(id).body);
    const auto r = m.post_events(id, live_event({}, 0.0, false));
    REQUIRE(r.status == 200);
    CHECK(r.body["reward"] == 0.0);
    CHECK(r.body["step"] == 1);
    const int action = r.body["action"];
    CHECK(layout_of(r.body["layout"]) == apply_action(before, ActionId{action}));
    CHECK(m.get_layout(id).body == r.body["layout"]);

    const auto shown = layout_of(r.body["layout"]);
    const auto r2 = m.post_events(id, live_event({shown.components[0].id, shown.components[3].id}, 0.5, true));
    REQUIRE(r2.status == 200);
    CHECK(r2.body["reward"].get<double>() == doctest::Approx(4.25));
}

TEST_CASE("live event validation") {
    SessionManager m(service_config());
    const std::string id = create(m, {{"mode", "live"}, {"agent", "dqn"}});
    auto expect = [&](const json& body, int status, const std::string& field) {
        const auto r = m.post_events(id, body);
        CHECK(r.status == status);
        if (!field.empty()) CHECK(r.body["field"] == field);
    };
    expect(json::array(), 400, "");
    expect({{"dwell_norm", 0.1}, {"returned", true}}, 422, "clicks");
    expect({{"clicks", json::array()}, {"returned", true}}, 422, "dwell_norm");
    expect({{"clicks", json::array()}, {"dwell_norm", 0.1}}, 422, "returned");
    expect(live_event({}, 1.5, true), 422, "dwell_norm");
    expect(live_event({42}, 0.5, true), 422, "clicks");
    expect(live_event({1, 1}, 0.5, true), 422, "clicks");
    expect({{"clicks", {"a"}}, {"dwell_norm", 0.1}, {"returned", true}}, 422, "clicks");
    CHECK(m.get_metrics(id).body["steps"] == 0);  // nothing was applied

    const std::string sim = create(m, {{"mode", "simulated"}, {"agent", "dqn"}, {"seed", 1}});
    CHECK(m.post_events(sim, live_event({}, 0.1, true)).status == 400);
    CHECK(m.post_events(sim, json::object()).status == 200);
    CHECK(m.post_events(sim, nullptr).status == 200);
}

TEST_CASE("metrics") {
    SessionManager m(service_config());
    const std::string id = create(m, {{"mode", "live"}, {"agent", "random"}, {"seed", 9}});
    auto metrics = m.get_metrics(id).body;
    CHECK(metrics["steps"] == 0);
    CHECK(metrics["ctr"].is_null());
    CHECK(metrics["rr_estimate"].is_null());

    double reward_sum = 0.0;
    for (int i = 0; i < 6; ++i) {
        const auto shown = layout_of(m.get_layout(id).body);
        reward_sum += m.post_events(id, live_event({shown.components[i].id}, 0.2, i % 2 == 0)).body["reward"].get<double>();
    }
    metrics = m.get_metrics(id).body;
    CHECK(metrics["steps"] == 6);
    CHECK(metrics["ctr"] == 1.0);
    CHECK(metrics["rr_estimate"] == 0.5);
    CHECK(metrics["mean_reward"].get<double>() == doctest::Approx(reward_sum / 6));

    // Simulated: recount from the posted responses.
    const std::string sim = create(m, {{"mode", "simulated"}, {"agent", "mab"}, {"seed", 4}});
    int steps = 0;
    double sum = 0.0;
    for (; steps < 30; ++steps) sum += m.post_events(sim, json::object()).body["reward"].get<double>();
    const auto sm = m.get_metrics(sim).body;
    CHECK(sm["steps"] == 30);
    CHECK(sm["mean_reward"].get<double>() == doctest::Approx(sum / 30));
    CHECK(m.get_metrics("nope").status == 404);
}

TEST_CASE("session lifecycle and capacity") {
    SessionManager m(service_config(1024));
    const std::string id = create(m, {{"mode", "live"}, {"agent", "dqn"}});
    CHECK(m.delete_session(id).status == 204);
    CHECK(m.get_layout(id).status == 404);
    CHECK(m.delete_session(id).status == 404);

    std::vector<std::string> ids;
    for (int i = 0; i < 1024; ++i) ids.push_back(create(m, {{"mode", "live"}, {"agent", "random"}}));
    CHECK(m.session_count() == 1024u);
    CHECK(m.create_session({{"mode", "live"}, {"agent", "random"}}).status == 503);
    CHECK(m.delete_session(ids[17]).status == 204);
    CHECK(m.create_session({{"mode", "live"}, {"agent", "random"}}).status == 201);
}

TEST_CASE("frozen sessions leave the shared agent untouched") {
    SessionManager m(service_config());
    const Mlp before = m.dqn()->agent.online();
    const std::string id = create(m, {{"mode", "simulated"}, {"agent", "dqn"}, {"online_learning", false}});
    for (int i = 0; i < 600; ++i) REQUIRE(m.post_events(id, json::object()).status == 200);
    CHECK(m.dqn()->agent.online() == before);
    CHECK(m.dqn()->agent.replay().size() == 0u);

    const std::string learner = create(m, {{"mode", "simulated"}, {"agent", "dqn"}, {"online_learning", true}});
    for (int i = 0; i < 600; ++i) REQUIRE(m.post_events(learner, json::object()).status == 200);
    CHECK(m.dqn()->agent.replay().size() == 600u);
    CHECK_FALSE(m.dqn()->agent.online() == before);
}

TEST_CASE("sessions are isolated and safe to drive concurrently") {
    SessionManager m(service_config());
    const std::string a = create(m, {{"mode", "simulated"}, {"agent", "random"}, {"seed", 1}});
    const std::string b = create(m, {{"mode", "simulated"}, {"agent", "random"}, {"seed", 2}});
    const auto b_layout = m.get_layout(b).body;
    for (int i = 0; i < 5; ++i) m.post_events(a, json::object());
    CHECK(m.get_layout(b).body == b_layout);
    CHECK(m.get_metrics(b).body["steps"] == 0);

    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i)
        ids.push_back(create(m, {{"mode", "simulated"}, {"agent", "dqn"}, {"online_learning", true}}));
    std::vector<std::thread> workers;
    for (int t = 0; t < 8; ++t)
        workers.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i) m.post_events(ids[t % 4], json::object());
        });
    for (auto& w : workers) w.join();
    int total = 0;
    for (const auto& id : ids) total += m.get_metrics(id).body["steps"].get<int>();
    CHECK(total == 400);
}

TEST_CASE("error body shape") {
    const auto r = error_response(422, "bad", "clicks");
    CHECK(r.status == 422);
    CHECK(r.body == json{{"error", "bad"}, {"field", "clicks"}});
    CHECK_FALSE(error_response(404, "x").body.contains("field"));
}

TEST_CASE("port from environment") {
    setenv("ADAPTIX_PORT", "9123", 1);
    CHECK(port_from_env() == 9123);
    unsetenv("ADAPTIX_PORT");
    CHECK(port_from_env(8080) == 8080);
}

}  // TEST_SUITE
