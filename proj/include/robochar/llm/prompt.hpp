#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robochar::llm {

enum class Stage { DescribePersona, Appraise, SelectAction, Reflect };

// Canonical section order. Bundles always carry all five, in this order.
enum class SectionTag { Persona, MemoryContext, HumanInput, Task, OutputSchema };

std::string_view stage_name(Stage stage);
std::optional<Stage> stage_from_name(std::string_view name);
std::string_view section_name(SectionTag tag);

inline constexpr std::string_view kNoMemories = "(no memories available)";
inline constexpr std::string_view kNoPersona = "(none)";

struct PromptSection {
    SectionTag tag;
    std::string text;

    bool operator==(const PromptSection&) const = default;
};

struct PromptBundle {
    Stage stage = Stage::Appraise;
    std::vector<PromptSection> sections;

    // Byte-deterministic rendering: a stage header followed by one
    // "### <SECTION>" block per section.
    std::string render() const;
    std::string_view section(SectionTag tag) const;
    // Hash of render(), used in turn traces.
    std::string hash() const;

    bool operator==(const PromptBundle&) const = default;
};

// Builds the canonical bundle for a stage. Memory texts are numbered in the
// order given (rank order); an empty list yields the kNoMemories sentinel.
// `space_text` is appended to the task section (select_action only).
PromptBundle assemble_prompt(Stage stage, std::string_view persona_text,
                             std::span<const std::string> memory_texts,
                             std::span<const std::string> input_texts,
                             std::optional<std::string_view> space_text = std::nullopt);

// Copy of `bundle` whose task section carries a note about the rejected output.
PromptBundle with_correction(const PromptBundle& bundle, std::string_view reason);

}  // namespace robochar::llm
