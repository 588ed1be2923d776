#pragma once

#include "robochar/action_space.hpp"
#include "robochar/appraisal.hpp"
#include "robochar/llm/backend.hpp"
#include "robochar/memory.hpp"
#include "robochar/persona.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace robochar {

struct AblationFlags {
    bool memory_enabled = true;
    bool emotion_enabled = true;

    bool operator==(const AblationFlags&) const = default;
};

struct RetrievalSettings {
    int top_k = 5;
    DecaySettings decay;

    bool operator==(const RetrievalSettings&) const = default;
};

struct AgentConfig {
    std::string name;
    PersonalityProfile profile;
    std::string space_id = "kitchen";
    llm::BackendConfig backend;
    AblationFlags ablation;
    RetrievalSettings retrieval;

    bool operator==(const AgentConfig&) const = default;
};

// Known action spaces by id. Starts with the kitchen space.
class SpaceRegistry {
public:
    SpaceRegistry();
    void add(ActionSpace space);
    const ActionSpace* find(std::string_view id) const;

    static const SpaceRegistry& builtin();

private:
    std::map<std::string, ActionSpace, std::less<>> spaces_;
};

struct Clock {
    int day = 1;
    int turn = 0;  // completed turns on the current day

    bool operator==(const Clock&) const = default;
};

struct TurnResult {
    HumanInput input;
    std::vector<RetrievedMemory> retrieved;
    AppraisalRecord appraisal;
    EmotionState emotion;
    ActionSelection selection;
    std::optional<std::string> episode_id;  // present iff memory is enabled
    std::vector<llm::StageRecord> trace;

    bool operator==(const TurnResult&) const = default;
};

struct DayReflection {
    int day = 1;
    std::vector<SemanticMemory> memories;
    std::optional<llm::StageRecord> trace;

    bool operator==(const DayReflection&) const = default;
};

// Ordered record of a replay. Entries interleave turns and reflections.
struct Transcript {
    struct Entry {
        std::optional<TurnResult> turn;
        std::optional<DayReflection> reflection;

        bool operator==(const Entry&) const = default;
    };
    std::vector<Entry> entries;

    std::vector<const TurnResult*> turns() const;
    bool operator==(const Transcript&) const = default;
};

// One robot character interacting with one human. Steps are serialized by
// the owner; a Session is not safe for concurrent mutation.
class Session {
public:
    Session(std::string id, AgentConfig config, ActionSpace space, std::unique_ptr<llm::Backend> backend);

    const std::string& id() const noexcept { return id_; }
    const AgentConfig& config() const noexcept { return config_; }
    const ActionSpace& space() const noexcept { return space_; }
    const MemoryStore& store() const noexcept { return store_; }
    const EmotionState& emotion() const noexcept { return emotion_; }
    const Clock& clock() const noexcept { return clock_; }
    std::int64_t ticks() const noexcept { return ticks_; }
    const std::vector<TurnResult>& transcript() const noexcept { return transcript_; }
    const std::string& persona_text() const noexcept { return persona_text_; }
    llm::Backend& backend() noexcept { return *backend_; }

    // retrieve -> appraise -> derive_emotion -> select_action -> log_episode.
    // Requires input.day >= clock().day; a later day moves the clock forward
    // without reflecting the skipped days. Any exception leaves the session
    // unchanged.
    TurnResult step(HumanInput input);

    // Reflects on the current day (memory enabled only) and advances the
    // clock. Failure leaves the session unchanged.
    DayReflection end_day();

    // State restoration for persistence; checks clock/store consistency.
    void restore(MemoryStore store, EmotionState emotion, Clock clock, std::int64_t ticks);

private:
    std::string id_;
    AgentConfig config_;
    ActionSpace space_;
    std::unique_ptr<llm::Backend> backend_;
    std::string persona_text_;
    MemoryStore store_;
    EmotionState emotion_;
    Clock clock_;
    std::int64_t ticks_ = 0;
    std::vector<TurnResult> transcript_;
};

// Validates the config (top_k >= 1, backend settings) and resolves the space.
// Throws UnknownSpace or ValidationError.
Session new_session(const AgentConfig& config, const SpaceRegistry& spaces = SpaceRegistry::builtin(),
                    std::string id = {});

// Same, with an explicitly supplied backend (tests, fault injection).
Session new_session(const AgentConfig& config, std::unique_ptr<llm::Backend> backend,
                    const SpaceRegistry& spaces = SpaceRegistry::builtin(), std::string id = {});

// Drives a fresh session: before each input whose day is later than the
// clock, the current day is closed with end_day(); then the turn is stepped.
Transcript replay(const AgentConfig& config, const std::vector<HumanInput>& inputs,
                  const SpaceRegistry& spaces = SpaceRegistry::builtin());

}  // namespace robochar
