#pragma once

#include "robochar/errors.hpp"
#include "robochar/llm/backend.hpp"
#include "robochar/text.hpp"

#include <string>
#include <utility>

namespace robochar::llm {

// One executed pipeline stage as it appears in a turn trace. LLM stages carry
// the hash of the final prompt sent and of the raw response it produced.
struct StageRecord {
    std::string stage;
    std::string prompt_hash;
    std::string response_hash;
    std::string response;
    int attempts = 0;
    bool fallback = false;
    std::string note;

    bool operator==(const StageRecord&) const = default;
};

// Sends `bundle`, parses the reply with `parse`, and re-prompts with a
// correction note on ParseError, for at most retry_budget + 1 calls.
// BackendError propagates immediately. On exhaustion the last ParseError is
// rethrown with the attempt count; `trace` still records the last exchange.
template <typename Parse>
auto call_with_retries(Backend& backend, PromptBundle bundle, Parse&& parse, StageRecord* trace)
    -> decltype(parse(std::string{})) {
    const PromptBundle original = bundle;
    const int budget = backend.config().retry_budget;
    std::string last_error;
    for (int attempt = 0; attempt <= budget; ++attempt) {
        std::string raw = backend.complete(bundle);
        if (trace) {
            trace->stage = std::string(stage_name(bundle.stage));
            trace->prompt_hash = bundle.hash();
            trace->response_hash = text::digest(raw);
            trace->response = raw;
            trace->attempts = attempt + 1;
        }
        try {
            return parse(raw);
        } catch (const ParseError& e) {
            last_error = e.what();
            bundle = with_correction(original, last_error);
        }
    }
    throw ParseError(std::string(stage_name(original.stage)) + " output rejected after " +
                     std::to_string(budget + 1) + " attempts: " + last_error);
}

}  // namespace robochar::llm
