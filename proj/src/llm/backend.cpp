#include "robochar/llm/backend.hpp"

#include "robochar/errors.hpp"
#include "robochar/llm/http_backend.hpp"
#include "robochar/llm/mock_backend.hpp"

namespace robochar::llm {

void BackendConfig::validate() const {
    if (!(temperature >= 0.0)) throw ValidationError("backend.temperature", "must be >= 0");
    if (retry_budget < 0) throw ValidationError("backend.retry_budget", "must be >= 0");
    if (timeout.count() <= 0) throw ValidationError("backend.timeout_ms", "must be > 0");
    if (backoff_base.count() < 0) throw ValidationError("backend.backoff_ms", "must be >= 0");
    if (kind == BackendKind::Http) {
        if (endpoint.empty()) throw ValidationError("backend.endpoint", "required for the http backend");
        if (model.empty()) throw ValidationError("backend.model", "required for the http backend");
    }
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
    config.validate();
    switch (config.kind) {
        case BackendKind::Mock: return std::make_unique<MockBackend>(config);
        case BackendKind::Http: return std::make_unique<HttpBackend>(config);
    }
    throw ValidationError("backend.kind", "unknown backend kind");
}

std::string complete(const BackendConfig& config, const PromptBundle& bundle) {
    return make_backend(config)->complete(bundle);
}

}  // namespace robochar::llm
