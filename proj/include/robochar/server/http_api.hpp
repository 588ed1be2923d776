#pragma once

#include "robochar/server/session_manager.hpp"

#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace robochar::server {

// HTTP/1.1 JSON API under /v1:
//   POST /v1/sessions                  AgentConfig document -> 201 {"session_id"}
//   POST /v1/sessions/{id}/turns       {"utterance","cues","day"} -> TurnResult
//   GET  /v1/sessions/{id}/memory      {"episodic": [...], "semantic": [...]}
//   POST /v1/sessions/{id}/end_day     {"day", "memories"}
//   GET  /v1/sessions/{id}/state       {"emotion", "clock", "profile", ...}
//   GET  /v1/health, GET /v1/cues
// Errors are {"error": message, "field"?: path} with 400/404/409/502; an
// unknown space_id on create is 404.
class ApiServer {
public:
    explicit ApiServer(SessionManager& manager);
    ~ApiServer();

    // Blocks until stop().
    bool listen(const std::string& host, int port);
    // Binds an ephemeral port and returns it, without serving yet.
    int bind_any_port(const std::string& host);
    // Serves on a socket bound by bind_any_port(); blocks until stop().
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    void install_routes();

    SessionManager& manager_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace robochar::server
