#pragma once

// JSON documents: agent configs, action spaces, memory snapshots, turn
// results, transcripts and reports. Every top-level document carries
// "schema_version": 1.

#include "robochar/engine.hpp"
#include "robochar/scenario.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

namespace robochar {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Record-level conversions (ADL hooks for nlohmann::json).
void to_json(json& j, const EmotionState& e);
void from_json(const json& j, EmotionState& e);
void to_json(json& j, const AppraisalRecord& a);
void from_json(const json& j, AppraisalRecord& a);
void to_json(json& j, const ActionSelection& s);
void from_json(const json& j, ActionSelection& s);
void to_json(json& j, const HumanInput& in);
void from_json(const json& j, HumanInput& in);
void to_json(json& j, const EpisodicRecord& r);
void from_json(const json& j, EpisodicRecord& r);
void to_json(json& j, const SemanticMemory& m);
void from_json(const json& j, SemanticMemory& m);
void to_json(json& j, const RetrievedMemory& m);
void from_json(const json& j, RetrievedMemory& m);
void to_json(json& j, const TurnResult& t);
void from_json(const json& j, TurnResult& t);
void to_json(json& j, const DayReflection& r);
void from_json(const json& j, DayReflection& r);
void to_json(json& j, const Clock& c);
void from_json(const json& j, Clock& c);
void to_json(json& j, const Violation& v);

json profile_to_json(const PersonalityProfile& profile);
// Accepts explicit trait levels, {"description": ...} (needs `describer`), or
// {"random_seed": N}. Throws ValidationError naming the field.
PersonalityProfile profile_from_json(const json& j, const std::string& path,
                                     llm::Backend* describer = nullptr);

json backend_to_json(const llm::BackendConfig& config);
llm::BackendConfig backend_from_json(const json& j, const std::string& path);

json config_to_json(const AgentConfig& config);
// Validates the whole document; descriptive profiles are resolved with a
// backend built from the document's own backend section.
AgentConfig config_from_json(const json& j);
AgentConfig load_config(const std::filesystem::path& path);

json space_to_json(const ActionSpace& space);
ActionSpace space_from_json(const json& j);
ActionSpace load_space(const std::filesystem::path& path);

json store_to_json(const MemoryStore& store);
MemoryStore store_from_json(const json& j);

json transcript_to_json(const Transcript& transcript);
json report_to_json(const ComparisonReport& report);

// Parses text as JSON; syntax errors become ParseError("line L, column C: ...").
json parse_document(std::string_view text);
json read_document(const std::filesystem::path& path);

// Deterministic text form: 2-space indent, sorted keys, trailing newline.
std::string dump_document(const json& j);

}  // namespace robochar
