#include "robochar/server/http_api.hpp"

#include "robochar/serialize.hpp"
#include "shipped_data.hpp"

#include <httplib.h>

namespace robochar::server {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                const std::string& field = {}) {
    json body{{"error", message}};
    if (!field.empty()) body["field"] = field;
    send_json(res, status, body);
}

json body_object(const httplib::Request& req) {
    json j = parse_document(req.body.empty() ? std::string_view("{}") : std::string_view(req.body));
    if (!j.is_object()) throw ValidationError("$", "request body must be a JSON object");
    return j;
}

HumanInput turn_input(const json& j) {
    HumanInput in;
    in.day = 0;
    if (j.contains("utterance")) {
        if (!j.at("utterance").is_string()) throw ValidationError("utterance", "expected a string");
        in.utterance = j.at("utterance").get<std::string>();
    }
    if (j.contains("cues")) {
        const auto& cues = j.at("cues");
        if (!cues.is_array()) throw ValidationError("cues", "expected an array of strings");
        for (std::size_t i = 0; i < cues.size(); ++i) {
            if (!cues[i].is_string()) throw ValidationError("cues[" + std::to_string(i) + "]", "expected a string");
            in.cues.push_back(cues[i].get<std::string>());
        }
    }
    if (j.contains("day")) {
        if (!j.at("day").is_number_integer() || j.at("day").get<int>() < 1) {
            throw ValidationError("day", "expected an integer >= 1");
        }
        in.day = j.at("day").get<int>();
    }
    if (j.contains("observed_reaction")) {
        if (!j.at("observed_reaction").is_string()) throw ValidationError("observed_reaction", "expected a string");
        in.observed_reaction = j.at("observed_reaction").get<std::string>();
    }
    if (text::trim(in.utterance).empty() && in.cues.empty()) {
        throw ValidationError("utterance", "an utterance or at least one cue is required");
    }
    return in;
}

// Maps library errors onto status codes. `backend_stage` marks calls where a
// ParseError can only come from rejected model output.
template <typename F>
void guarded(httplib::Response& res, bool backend_stage, F&& body) {
    try {
        body();
    } catch (const SessionNotFound& e) {
        send_error(res, 404, e.what());
    } catch (const SessionBusy& e) {
        send_error(res, 409, e.what());
    } catch (const ValidationError& e) {
        send_error(res, 400, e.what(), e.field());
    } catch (const UnknownSpace& e) {
        send_error(res, 404, e.what(), "space_id");
    } catch (const BackendError& e) {
        send_error(res, 502, e.what());
    } catch (const OrderViolation& e) {
        send_error(res, 409, e.what(), "day");
    } catch (const ParseError& e) {
        send_error(res, backend_stage ? 502 : 400, e.what());
    } catch (const PreconditionError& e) {
        send_error(res, 400, e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, e.what());
    }
}

}  // namespace

ApiServer::ApiServer(SessionManager& manager) : manager_(manager), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

ApiServer::~ApiServer() {
    stop();
}

void ApiServer::install_routes() {
    auto& srv = *server_;

    srv.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, json{{"status", "ok"}, {"sessions", manager_.session_ids().size()}});
    });

    srv.Get("/v1/cues", [](const httplib::Request&, httplib::Response& res) {
        const json doc = parse_document(shipped::cues_json());
        send_json(res, 200, json{{"cues", doc.at("cues")}});
    });

    srv.Post("/v1/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, false, [&] {
            const AgentConfig config = config_from_json(body_object(req));
            const auto id = manager_.create_session(config);
            send_json(res, 201, json{{"session_id", id}});
        });
    });

    srv.Post("/v1/sessions/:id/turns", [this](const httplib::Request& req, httplib::Response& res) {
        HumanInput input;
        bool parsed = false;
        guarded(res, false, [&] {
            input = turn_input(body_object(req));
            parsed = true;
        });
        if (!parsed) return;
        guarded(res, true, [&] { send_json(res, 200, manager_.post_turn(req.path_params.at("id"), input)); });
    });

    srv.Post("/v1/sessions/:id/end_day", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, true, [&] { send_json(res, 200, manager_.end_day(req.path_params.at("id"))); });
    });

    srv.Get("/v1/sessions/:id/memory", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, false, [&] { send_json(res, 200, manager_.get_memory(req.path_params.at("id"))); });
    });

    srv.Get("/v1/sessions/:id/state", [this](const httplib::Request& req, httplib::Response& res) {
        guarded(res, false, [&] { send_json(res, 200, manager_.get_state(req.path_params.at("id"))); });
    });
}

bool ApiServer::listen(const std::string& host, int port) {
    return server_->listen(host, port);
}

int ApiServer::bind_any_port(const std::string& host) {
    return server_->bind_to_any_port(host);
}

bool ApiServer::listen_after_bind() {
    return server_->listen_after_bind();
}

void ApiServer::stop() {
    if (server_ && server_->is_running()) server_->stop();
}

void ApiServer::wait_until_ready() const {
    server_->wait_until_ready();
}

}  // namespace robochar::server
