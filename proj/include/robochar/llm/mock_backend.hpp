#pragma once

#include "robochar/llm/backend.hpp"
#include "robochar/llm/lexicon.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace robochar::llm {

struct MockRules;

// Deterministic rule-table backend. The reply is a pure function of
// (seed, bundle); model and temperature are ignored.
class MockBackend final : public Backend {
public:
    explicit MockBackend(BackendConfig config);
    MockBackend(BackendConfig config, std::string_view rules_json, Lexicon lexicon);
    ~MockBackend() override;

    // Reply text for a bundle without touching the call counter.
    std::string respond(const PromptBundle& bundle) const;

protected:
    std::string do_complete(const PromptBundle& bundle) override { return respond(bundle); }

private:
    std::shared_ptr<const MockRules> rules_;
    Lexicon lexicon_;
};

}  // namespace robochar::llm
