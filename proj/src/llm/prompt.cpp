#include "robochar/llm/prompt.hpp"

#include "robochar/errors.hpp"
#include "robochar/llm/payload.hpp"
#include "robochar/text.hpp"

#include <array>

namespace robochar::llm {

namespace {

constexpr std::array kSectionOrder = {SectionTag::Persona, SectionTag::MemoryContext,
                                      SectionTag::HumanInput, SectionTag::Task,
                                      SectionTag::OutputSchema};

std::string_view task_text(Stage stage) {
    switch (stage) {
        case Stage::DescribePersona:
            return "Infer the Big Five trait levels (Low, Medium-low, Medium, Medium-high, High) of "
                   "the robot character described in the persona section. Reply with JSON only.";
        case Stage::Appraise:
            return "You are the robot character above. Appraise the human input in the context of "
                   "your personality and memories: rate its relevance to you (0 to 1), its valence "
                   "(-1 to 1) and its potential impact (0 to 1), and infer what the human means. "
                   "When nonverbal cues contradict the words, trust the cues. Reply with JSON only.";
        case Stage::SelectAction:
            return "You are the robot character above. Given the appraisal and your emotion, choose "
                   "exactly one action from the action space below, bind every parameter, and say "
                   "something in character. Object, drink and motion values must be tokens; objects "
                   "and drinks must be in the inventory. Reply with JSON only.";
        case Stage::Reflect:
            return "Reflect on today's episodes listed in the memory section. Extract higher-level "
                   "insights about the user, such as preferences, that will matter in future days. "
                   "Cite the supporting episodes by their number. Reply with JSON only.";
    }
    return "";
}

}  // namespace

std::string_view stage_name(Stage stage) {
    switch (stage) {
        case Stage::DescribePersona: return "describe_persona";
        case Stage::Appraise: return "appraise";
        case Stage::SelectAction: return "select_action";
        case Stage::Reflect: return "reflect";
    }
    return "appraise";
}

std::optional<Stage> stage_from_name(std::string_view name) {
    for (auto s : {Stage::DescribePersona, Stage::Appraise, Stage::SelectAction, Stage::Reflect}) {
        if (stage_name(s) == name) return s;
    }
    return std::nullopt;
}

std::string_view section_name(SectionTag tag) {
    switch (tag) {
        case SectionTag::Persona: return "PERSONA";
        case SectionTag::MemoryContext: return "MEMORY_CONTEXT";
        case SectionTag::HumanInput: return "HUMAN_INPUT";
        case SectionTag::Task: return "TASK";
        case SectionTag::OutputSchema: return "OUTPUT_SCHEMA";
    }
    return "TASK";
}

std::string PromptBundle::render() const {
    std::string out = "=== STAGE: ";
    out += stage_name(stage);
    out += " ===\n";
    for (const auto& s : sections) {
        out += "### ";
        out += section_name(s.tag);
        out += '\n';
        out += s.text;
        out += '\n';
    }
    return out;
}

std::string_view PromptBundle::section(SectionTag tag) const {
    for (const auto& s : sections) {
        if (s.tag == tag) return s.text;
    }
    return {};
}

std::string PromptBundle::hash() const {
    return text::digest(render());
}

PromptBundle assemble_prompt(Stage stage, std::string_view persona_text,
                             std::span<const std::string> memory_texts,
                             std::span<const std::string> input_texts,
                             std::optional<std::string_view> space_text) {
    std::string persona = text::trim(persona_text);
    if (persona.empty()) {
        if (stage != Stage::Reflect) {
            throw PreconditionError(std::string("persona text is required for stage ") +
                                    std::string(stage_name(stage)));
        }
        persona = kNoPersona;
    }

    std::string memory;
    if (memory_texts.empty()) {
        memory = kNoMemories;
    } else {
        for (std::size_t i = 0; i < memory_texts.size(); ++i) {
            if (i) memory += '\n';
            memory += std::to_string(i + 1) + ". " + text::trim(memory_texts[i]);
        }
    }

    std::string input;
    for (std::size_t i = 0; i < input_texts.size(); ++i) {
        if (i) input += '\n';
        input += text::trim(input_texts[i]);
    }
    if (input.empty()) input = "(none)";

    std::string task(task_text(stage));
    if (space_text && !text::trim(*space_text).empty()) {
        task += "\n\n";
        task += text::trim(*space_text);
    }

    PromptBundle bundle;
    bundle.stage = stage;
    for (auto tag : kSectionOrder) {
        switch (tag) {
            case SectionTag::Persona: bundle.sections.push_back({tag, persona}); break;
            case SectionTag::MemoryContext: bundle.sections.push_back({tag, memory}); break;
            case SectionTag::HumanInput: bundle.sections.push_back({tag, input}); break;
            case SectionTag::Task: bundle.sections.push_back({tag, task}); break;
            case SectionTag::OutputSchema:
                bundle.sections.push_back({tag, std::string(output_schema_text(stage))});
                break;
        }
    }
    return bundle;
}

PromptBundle with_correction(const PromptBundle& bundle, std::string_view reason) {
    PromptBundle out = bundle;
    for (auto& s : out.sections) {
        if (s.tag == SectionTag::Task) {
            s.text += "\n\nYour previous reply was rejected: ";
            s.text += reason;
            s.text += ". Reply again and follow the output schema exactly.";
        }
    }
    return out;
}

}  // namespace robochar::llm
