#pragma once

#include "robochar/llm/backend.hpp"

#include <functional>
#include <mutex>
#include <string>
#include <vector>

namespace robochar::llm {

// Replays canned replies in order (the last one repeats), or delegates to a
// callback. Records every bundle it receives. Used for fault injection.
class ScriptedBackend final : public Backend {
public:
    using Responder = std::function<std::string(const PromptBundle&, std::size_t call_index)>;

    explicit ScriptedBackend(std::vector<std::string> replies, BackendConfig config = {});
    explicit ScriptedBackend(Responder responder, BackendConfig config = {});

    std::vector<PromptBundle> received() const;

protected:
    std::string do_complete(const PromptBundle& bundle) override;

private:
    std::vector<std::string> replies_;
    Responder responder_;
    mutable std::mutex mutex_;
    std::vector<PromptBundle> received_;
};

}  // namespace robochar::llm
