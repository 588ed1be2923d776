#pragma once

#include "robochar/engine.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace robochar {

struct ScriptTurn {
    std::string label;  // e.g. "Scenario III"
    int day = 1;
    std::string slot;   // e.g. "dinner"
    std::string utterance;
    std::vector<std::string> cues;
    std::string observed_reaction;

    HumanInput to_input() const;
    bool operator==(const ScriptTurn&) const = default;
};

struct Script {
    std::string id;
    std::string description;
    std::vector<ScriptTurn> turns;
    // Turn indices on which all configs are expected to choose pairwise
    // distinct actions.
    std::vector<int> expect_distinct;

    std::vector<HumanInput> inputs() const;
    bool operator==(const Script&) const = default;
};

// Throws ParseError with "line N" for malformed JSON, or ValidationError
// naming the field (e.g. "turns[2].day") for schema violations.
Script parse_script(std::string_view document);
Script load_script(const std::filesystem::path& path);

struct TurnDivergence {
    int turn = 0;
    std::string label;
    std::vector<std::string> selections;  // one per config, "" if that config failed
    double distinct_rate = 0.0;           // fraction of config pairs that differ
    bool diverged = false;                // any pair differs

    bool operator==(const TurnDivergence&) const = default;
};

struct ConfigOutcome {
    std::string name;
    std::optional<Transcript> transcript;
    std::string transcript_digest;
    std::optional<std::string> error;

    bool operator==(const ConfigOutcome&) const = default;
};

struct NamedCheck {
    std::string name;
    bool passed = false;
    std::string detail;

    bool operator==(const NamedCheck&) const = default;
};

struct ComparisonReport {
    std::string script_id;
    std::vector<ConfigOutcome> configs;
    std::vector<TurnDivergence> turns;
    double distinct_rate = 0.0;  // mean of per-turn rates
    std::vector<NamedCheck> checks;

    bool all_checks_passed() const;
    bool operator==(const ComparisonReport&) const = default;
};

// Pairwise distinct-selection rate over (action_id, bindings). Configs that
// failed (empty key) are excluded from the pairs.
double distinct_rate(const std::vector<std::string>& selection_keys);

// Replays `script` once per config. A failing config is recorded and the
// others continue. Configs run concurrently when `parallel` is set.
ComparisonReport run_matrix(const Script& script, const std::vector<AgentConfig>& configs,
                            const SpaceRegistry& spaces = SpaceRegistry::builtin(),
                            bool parallel = false);

// Plain-text table for terminals.
std::string render_report_table(const ComparisonReport& report);

}  // namespace robochar
