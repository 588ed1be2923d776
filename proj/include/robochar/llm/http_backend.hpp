#pragma once

#include "robochar/llm/backend.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <string>

namespace robochar::llm {

// Chat-completion client. One POST per attempt to
// <endpoint>/v1/chat/completions with
//   {"model", "temperature", "seed", "messages": [system, user]}
// and a "Authorization: Bearer $<api_key_env>" header when the variable is
// set. The reply text is choices[0].message.content. Timeouts, connection
// failures, HTTP 429 and 5xx are retried up to retry_budget times with
// exponential backoff (backoff_base * 2^(retry - 1)); anything else fails fast.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(BackendConfig config);

    // Request body for a bundle: the system message is the persona section,
    // the user message is the full rendered bundle.
    nlohmann::json request_body(const PromptBundle& bundle) const;
    // Extracts choices[0].message.content; throws BackendError(Http) otherwise.
    static std::string extract_text(std::string_view response_body);

    std::size_t attempts() const noexcept { return attempts_; }

protected:
    std::string do_complete(const PromptBundle& bundle) override;

private:
    std::string attempt_once(const std::string& body);

    std::string host_;
    std::string base_path_;
    std::atomic<std::size_t> attempts_{0};
};

}  // namespace robochar::llm
