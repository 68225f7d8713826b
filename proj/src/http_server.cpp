#include <cstdlib>
#include <string>

#include "adaptix/service.hpp"
#include "httplib.h"

namespace adaptix {

int port_from_env(int fallback) {
    const char* v = std::getenv("ADAPTIX_PORT");
    if (!v || !*v) return fallback;
    char* end = nullptr;
    const long p = std::strtol(v, &end, 10);
    if (*end != '\0' || p < 1 || p > 65535) return fallback;
    return static_cast<int>(p);
}

bool run_http_server(SessionManager& manager, const HttpOptions& options) {
    httplib::Server server;
    const std::string origin = options.cors_origin;

    auto send = [origin](httplib::Response& res, const ApiResponse& api) {
        res.status = api.status;
        res.set_header("Access-Control-Allow-Origin", origin);
        if (api.status != 204) res.set_content(api.body.dump(), "application/json");
    };
    auto parse_body = [](const httplib::Request& req) -> std::optional<nlohmann::json> {
        if (req.body.empty()) return nlohmann::json();
        auto j = nlohmann::json::parse(req.body, nullptr, false);
        if (j.is_discarded()) return std::nullopt;
        return j;
    };

    server.Options(R"(/sessions.*)", [origin](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        send(res, body ? manager.create_session(*body) : error_response(400, "malformed JSON"));
    });
    server.Get(R"(/sessions/([^/]+)/layout)", [&](const httplib::Request& req, httplib::Response& res) {
        send(res, manager.get_layout(req.matches[1]));
    });
    server.Post(R"(/sessions/([^/]+)/events)", [&](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        send(res, body ? manager.post_events(req.matches[1], *body) : error_response(400, "malformed JSON"));
    });
    server.Get(R"(/sessions/([^/]+)/metrics)", [&](const httplib::Request& req, httplib::Response& res) {
        send(res, manager.get_metrics(req.matches[1]));
    });
    server.Delete(R"(/sessions/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
        send(res, manager.delete_session(req.matches[1]));
    });
    return server.listen(options.host, options.port);
}

}  // namespace adaptix
