#include "robochar/llm/scripted_backend.hpp"

#include "robochar/errors.hpp"

namespace robochar::llm {

ScriptedBackend::ScriptedBackend(std::vector<std::string> replies, BackendConfig config)
    : Backend(std::move(config)), replies_(std::move(replies)) {
    if (replies_.empty()) throw PreconditionError("scripted backend needs at least one reply");
}

ScriptedBackend::ScriptedBackend(Responder responder, BackendConfig config)
    : Backend(std::move(config)), responder_(std::move(responder)) {}

std::vector<PromptBundle> ScriptedBackend::received() const {
    std::lock_guard lock(mutex_);
    return received_;
}

std::string ScriptedBackend::do_complete(const PromptBundle& bundle) {
    std::size_t index = 0;
    {
        std::lock_guard lock(mutex_);
        index = received_.size();
        received_.push_back(bundle);
    }
    if (responder_) return responder_(bundle, index);
    return replies_[std::min(index, replies_.size() - 1)];
}

}  // namespace robochar::llm
