#include "robochar/action.hpp"

#include "robochar/appraisal.hpp"
#include "robochar/errors.hpp"
#include "robochar/llm/payload.hpp"
#include "robochar/llm/prompt.hpp"
#include "robochar/text.hpp"

#include <fmt/format.h>

namespace robochar {

std::string describe_selection(const ActionSelection& selection) {
    std::string out = selection.action_id + '(';
    bool first = true;
    for (const auto& [name, value] : selection.bindings) {
        if (!first) out += ',';
        first = false;
        out += name + '=' + value;
    }
    return out + ')';
}

ActionSelection select_action(const HumanInput& input, const EmotionState& emotion,
                              const AppraisalRecord& appraisal, const PersonalityProfile& profile,
                              std::span<const RetrievedMemory> memories, const ActionSpace& space,
                              llm::Backend& backend, llm::StageRecord* trace) {
    std::vector<std::string> memory_texts;
    memory_texts.reserve(memories.size());
    for (const auto& m : memories) memory_texts.push_back(m.text);

    auto lines = render_input_lines(input, true);
    lines.push_back("Intent: " + appraisal.inferred_intent);
    lines.push_back(fmt::format("Appraisal: relevance={} valence={} impact={}", text::fixed(appraisal.relevance),
                                text::fixed(appraisal.valence), text::fixed(appraisal.impact)));
    lines.push_back(fmt::format("Emotion: {} intensity={} valence={} arousal={}", emotion_name(emotion.label),
                                text::fixed(emotion.intensity), text::fixed(emotion.valence),
                                text::fixed(emotion.arousal)));
    const auto space_text = render_space_text(space);
    const auto bundle = llm::assemble_prompt(llm::Stage::SelectAction, render_persona_text(profile), memory_texts,
                                             lines, space_text);
    try {
        return llm::call_with_retries(
            backend, bundle,
            [&](const std::string& raw) {
                auto selection = llm::parse_selection(raw);
                const auto violations = validate_selection(selection, space);
                if (!violations.empty()) {
                    std::vector<std::string> reasons;
                    for (const auto& v : violations) reasons.push_back(v.message);
                    throw ParseError("invalid action: " + text::join(reasons, "; "));
                }
                return selection;
            },
            trace);
    } catch (const ParseError& e) {
        if (trace) {
            trace->fallback = true;
            trace->note = e.what();
        }
        ActionSelection fallback;
        fallback.utterance = std::string(kFallbackUtterance);
        fallback.rationale = "Fallback after rejected selections.";
        return fallback;
    }
}

}  // namespace robochar
