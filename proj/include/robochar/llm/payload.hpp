#pragma once

#include "robochar/action_space.hpp"
#include "robochar/emotion.hpp"
#include "robochar/llm/prompt.hpp"
#include "robochar/persona.hpp"

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace robochar::llm {

struct ReflectionInsight {
    std::string statement;
    std::vector<int> supporting;  // 1-based positions in the prompt's episode list
    double confidence = 0.0;

    bool operator==(const ReflectionInsight&) const = default;
};

struct ReflectionPayload {
    std::vector<ReflectionInsight> insights;

    bool operator==(const ReflectionPayload&) const = default;
};

using StructuredPayload = std::variant<TraitLevels, AppraisalRecord, ActionSelection, ReflectionPayload>;

// Strict parse of a backend reply against the stage schema. The reply may wrap
// the JSON object in prose or code fences; the outermost {...} is used.
// Unknown keys are ignored. Throws ParseError naming the missing key or the
// violated bound.
StructuredPayload parse_payload(Stage stage, std::string_view raw);

TraitLevels parse_persona_levels(std::string_view raw);
AppraisalRecord parse_appraisal(std::string_view raw);
ActionSelection parse_selection(std::string_view raw);
ReflectionPayload parse_reflection(std::string_view raw);

// Canonical JSON text; parse_payload(stage, serialize_payload(p)) == p.
std::string serialize_payload(const StructuredPayload& payload);

// Schema description placed in the output_schema prompt section.
std::string_view output_schema_text(Stage stage);

}  // namespace robochar::llm
