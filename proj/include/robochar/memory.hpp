#pragma once

#include "robochar/action_space.hpp"
#include "robochar/emotion.hpp"
#include "robochar/llm/backend.hpp"
#include "robochar/llm/structured_call.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace robochar {

/// Summary of one interaction turn: what the human did, how the robot felt and
/// acted, and how the human reacted.
struct EpisodicRecord {
    std::string id;  // assigned by the store when empty
    int day = 1;
    std::int64_t timestamp = 0;
    std::string human_action;
    double human_valence = 0.0;
    EmotionState robot_emotion;
    ActionSelection robot_response;
    std::string observed_reaction;
    double reaction_valence = 0.0;
    double importance = 0.0;

    bool operator==(const EpisodicRecord&) const = default;
};

/// Insight distilled from one or more episodes by end-of-day reflection.
struct SemanticMemory {
    std::string id;
    std::string statement;
    std::vector<std::string> supporting_episodes;
    int created_day = 1;
    // Timestamp of the newest episode at creation; the recency anchor.
    std::int64_t created_at = 0;
    double confidence = 0.0;

    bool operator==(const SemanticMemory&) const = default;
};

/// Append-only store for one session. Single writer.
class MemoryStore {
public:
    const std::vector<EpisodicRecord>& episodic() const noexcept { return episodic_; }
    const std::vector<SemanticMemory>& semantic() const noexcept { return semantic_; }
    int current_day() const noexcept { return current_day_; }
    std::int64_t last_timestamp() const noexcept;
    bool empty() const noexcept { return episodic_.empty() && semantic_.empty(); }

    /// Appends a record for the current day. Throws OrderViolation when the
    /// timestamp does not increase, PreconditionError on out-of-range fields,
    /// a day other than current_day(), or a duplicate id.
    std::string log_episode(EpisodicRecord record);

    /// Appends an insight after checking its supporting ids resolve and its
    /// day is not earlier than theirs.
    std::string add_semantic(SemanticMemory memory);

    /// Marks `day` as reflected and moves to day + 1. Throws OrderViolation
    /// unless day == current_day().
    void close_day(int day);

    /// Jumps forward to `day` without reflecting the skipped days.
    void advance_to(int day);

    const EpisodicRecord* find_episode(std::string_view id) const;
    std::vector<EpisodicRecord> episodes_of_day(int day) const;

    /// Rebuilds a store from serialized state, re-checking every invariant.
    static MemoryStore restore(int current_day, std::vector<EpisodicRecord> episodic,
                               std::vector<SemanticMemory> semantic);

    bool operator==(const MemoryStore&) const = default;

private:
    bool id_taken(std::string_view id) const;

    std::vector<EpisodicRecord> episodic_;
    std::vector<SemanticMemory> semantic_;
    int current_day_ = 1;
};

/// min(1, (|human_valence| + |reaction_valence|) / 2 + 0.2 if the response
/// used a physical action).
double score_importance(const EpisodicRecord& record);

struct DecaySettings {
    // Per-day decay rate; default is a 7-day half-life.
    double lambda_per_day = std::numbers::ln2 / 7.0;
    // Sub-day clock: each turn-counter tick ages a memory by this many days.
    double days_per_tick = 1.0 / 24.0;

    bool operator==(const DecaySettings&) const = default;
};

struct RetrievalQuery {
    std::string context;
    int day = 1;
    std::int64_t now = 0;
    int top_k = 5;
};

enum class MemoryKind { Episodic, Semantic };

struct RetrievedMemory {
    MemoryKind kind = MemoryKind::Episodic;
    std::string id;
    std::string text;  // prompt rendering
    int day = 1;
    std::int64_t timestamp = 0;
    double recency = 0.0;
    double importance = 0.0;
    double relevance = 0.0;
    double score = 0.0;

    bool operator==(const RetrievedMemory&) const = default;
};

/// Fraction of the query's content words that also occur in `memory_text`.
double lexical_relevance(std::string_view query, std::string_view memory_text);

/// Age in days: whole-day difference plus days_per_tick per timestamp tick,
/// floored at zero.
double memory_age_days(int now_day, std::int64_t now, int memory_day, std::int64_t memory_timestamp,
                       const DecaySettings& decay);

/// Pools episodic and semantic memories and returns at most top_k, best first.
/// score = (exp(-lambda * age) + importance + relevance) / 3; ties go to the
/// newer memory, then the smaller id. Throws PreconditionError if top_k < 1.
std::vector<RetrievedMemory> retrieve(const MemoryStore& store, const RetrievalQuery& query,
                                      const DecaySettings& decay = {});

/// Text matched against retrieval queries.
std::string relevance_text(const EpisodicRecord& record);

/// Single-line key=value rendering used in prompts.
std::string render_episode_line(const EpisodicRecord& record);

/// Reflects on `day`: sends that day's episodes (plus existing insights) to
/// the backend, appends the returned insights and closes the day. A day
/// without episodes returns an empty list without calling the backend.
/// Throws OrderViolation if `day` is not the store's current day.
std::vector<SemanticMemory> reflect(MemoryStore& store, int day, llm::Backend& backend,
                                    llm::StageRecord* trace = nullptr);

}  // namespace robochar
