#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "adaptix/dqn_policy.hpp"
#include "adaptix/experiment.hpp"
#include "json.hpp"

namespace adaptix {

struct ApiResponse {
    int status = 200;
    nlohmann::json body;  // null for 204
};

// What a second concurrent mutation of the same session does.
enum class BusyPolicy { wait, reject };

struct ServiceConfig {
    ExperimentConfig experiment;
    std::size_t capacity = 1024;
    double live_epsilon = 0.05;
    BusyPolicy busy = BusyPolicy::wait;
};

// Transport-independent session API. Every method is thread-safe.
class SessionManager {
public:
    // `dqn` backs every "dqn" session and may learn online; when null a fresh
    // untrained agent is created.
    explicit SessionManager(ServiceConfig cfg, std::shared_ptr<SharedDqn> dqn = nullptr);

    ApiResponse create_session(const nlohmann::json& body);
    ApiResponse get_layout(const std::string& id);
    ApiResponse post_events(const std::string& id, const nlohmann::json& body);
    ApiResponse get_metrics(const std::string& id);
    ApiResponse delete_session(const std::string& id);

    std::size_t session_count() const;
    const ServiceConfig& config() const { return cfg_; }
    const std::shared_ptr<SharedDqn>& dqn() const { return dqn_; }

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;
    nlohmann::json layout_doc(const LayoutState& s) const;

    ServiceConfig cfg_;
    std::shared_ptr<SharedDqn> dqn_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

ApiResponse error_response(int status, const std::string& message, const std::string& field = {});

struct HttpOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors_origin = "*";
};

// ADAPTIX_PORT overrides the default port when set.
int port_from_env(int fallback = 8080);

// Blocks serving the five session routes until the process is stopped.
// Returns false when the socket cannot be bound.
bool run_http_server(SessionManager& manager, const HttpOptions& options);

}  // namespace adaptix
