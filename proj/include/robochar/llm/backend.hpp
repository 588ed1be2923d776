#pragma once

#include "robochar/llm/prompt.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

namespace robochar::llm {

enum class BackendKind { Mock, Http };

struct BackendConfig {
    BackendKind kind = BackendKind::Mock;
    std::string model = "gpt-4o-mini";
    double temperature = 0.7;
    std::uint64_t seed = 0;
    // Extra attempts after the first, for both transport and parse failures.
    int retry_budget = 2;
    std::chrono::milliseconds timeout{30000};
    std::chrono::milliseconds backoff_base{250};
    // Base URL of the chat-completion service; requests go to
    // <endpoint>/v1/chat/completions.
    std::string endpoint = "http://127.0.0.1:8080";
    std::string api_key_env = "ROBOCHAR_API_KEY";

    // Throws ValidationError on negative temperature/budget or empty fields.
    void validate() const;

    bool operator==(const BackendConfig&) const = default;
};

// A completion engine. complete() is one logical call; transport retries
// (http) happen inside it.
class Backend {
public:
    explicit Backend(BackendConfig config) : config_(std::move(config)) {}
    virtual ~Backend() = default;

    Backend(const Backend&) = delete;
    Backend& operator=(const Backend&) = delete;

    std::string complete(const PromptBundle& bundle) {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return do_complete(bundle);
    }

    const BackendConfig& config() const noexcept { return config_; }
    std::size_t calls() const noexcept { return calls_.load(std::memory_order_relaxed); }

protected:
    virtual std::string do_complete(const PromptBundle& bundle) = 0;

private:
    BackendConfig config_;
    std::atomic<std::size_t> calls_{0};
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// One-shot convenience: builds the configured backend and runs one call.
std::string complete(const BackendConfig& config, const PromptBundle& bundle);

}  // namespace robochar::llm
