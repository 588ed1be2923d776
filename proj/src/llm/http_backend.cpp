#include "robochar/llm/http_backend.hpp"

#include "robochar/errors.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <cstdlib>
#include <thread>

namespace robochar::llm {

namespace {

struct Attempt {
    std::string text;
    std::optional<BackendError> error;
};

}  // namespace

HttpBackend::HttpBackend(BackendConfig config) : Backend(std::move(config)) {
    const std::string& endpoint = this->config().endpoint;
    const auto scheme_end = endpoint.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = endpoint.find('/', host_start);
    host_ = endpoint.substr(0, path_start);
    base_path_ = path_start == std::string::npos ? "" : endpoint.substr(path_start);
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
}

nlohmann::json HttpBackend::request_body(const PromptBundle& bundle) const {
    return {{"model", config().model},
            {"temperature", config().temperature},
            {"seed", config().seed},
            {"messages",
             nlohmann::json::array(
                 {{{"role", "system"}, {"content", std::string(bundle.section(SectionTag::Persona))}},
                  {{"role", "user"}, {"content", bundle.render()}}})}};
}

std::string HttpBackend::extract_text(std::string_view response_body) {
    try {
        const auto j = nlohmann::json::parse(response_body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(BackendFailure::Http,
                           std::string("response has no choices[0].message.content: ") + e.what());
    }
}

std::string HttpBackend::attempt_once(const std::string& body) {
    attempts_.fetch_add(1, std::memory_order_relaxed);
    httplib::Client client(host_);
    const auto timeout = config().timeout;
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (const char* key = std::getenv(config().api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto res = client.Post(base_path_ + "/v1/chat/completions", headers, body, "application/json");
    if (!res) {
        const auto err = res.error();
        const bool timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
        throw BackendError(timed_out ? BackendFailure::Timeout : BackendFailure::Transport,
                           "request to " + host_ + " failed: " + httplib::to_string(err));
    }
    if (res->status == 429) {
        throw BackendError(BackendFailure::RateLimited, "rate limited (HTTP 429)");
    }
    if (res->status >= 500) {
        throw BackendError(BackendFailure::Transport, fmt::format("server error (HTTP {})", res->status));
    }
    if (res->status != 200) {
        throw BackendError(BackendFailure::Http, fmt::format("unexpected HTTP {}: {}", res->status, res->body));
    }
    return extract_text(res->body);
}

std::string HttpBackend::do_complete(const PromptBundle& bundle) {
    const std::string body = request_body(bundle).dump();
    const int budget = config().retry_budget;
    std::string last;
    for (int attempt = 0; attempt <= budget; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(config().backoff_base * (1LL << (attempt - 1)));
        }
        try {
            return attempt_once(body);
        } catch (const BackendError& e) {
            if (!e.retryable()) throw;
            last = e.what();
        }
    }
    throw BackendError(BackendFailure::Exhausted,
                       fmt::format("backend failed after {} attempts: {}", budget + 1, last));
}

}  // namespace robochar::llm
