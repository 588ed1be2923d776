#include "robochar/scenario.hpp"

#include "json_fields.hpp"
#include "robochar/action.hpp"
#include "robochar/errors.hpp"
#include "robochar/serialize.hpp"
#include "robochar/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <future>
#include <numeric>
#include <set>

namespace robochar {

using detail::index_path;
using detail::join_path;
using detail::optional_or;
using detail::required;

HumanInput ScriptTurn::to_input() const {
    HumanInput in;
    in.utterance = utterance;
    in.cues = cues;
    in.day = day;
    in.observed_reaction = observed_reaction;
    return in;
}

std::vector<HumanInput> Script::inputs() const {
    std::vector<HumanInput> out;
    out.reserve(turns.size());
    for (const auto& t : turns) out.push_back(t.to_input());
    return out;
}

Script parse_script(std::string_view document) {
    const json j = parse_document(document);
    detail::check_schema_version(j, kSchemaVersion);
    Script s;
    s.id = required<std::string>(j, "", "id");
    if (text::trim(s.id).empty()) throw ValidationError("id", "must be non-empty");
    s.description = optional_or<std::string>(j, "", "description", "");
    if (!j.contains("turns") || !j.at("turns").is_array()) throw ValidationError("turns", "expected an array");
    const auto& turns = j.at("turns");
    int last_day = 1;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        const auto path = index_path("turns", i);
        const auto& t = turns[i];
        detail::require_object(t, path);
        ScriptTurn turn;
        turn.label = optional_or<std::string>(t, path, "label", fmt::format("Turn {}", i + 1));
        turn.day = required<int>(t, path, "day");
        if (turn.day < 1) throw ValidationError(join_path(path, "day"), "must be >= 1");
        if (turn.day < last_day) throw ValidationError(join_path(path, "day"), "days must not decrease");
        last_day = turn.day;
        turn.slot = optional_or<std::string>(t, path, "slot", "");
        turn.utterance = optional_or<std::string>(t, path, "utterance", "");
        turn.cues = detail::string_list(t, path, "cues");
        turn.observed_reaction = optional_or<std::string>(t, path, "observed_reaction", "");
        if (text::trim(turn.utterance).empty() && turn.cues.empty()) {
            throw ValidationError(join_path(path, "utterance"), "a turn needs an utterance or cues");
        }
        s.turns.push_back(std::move(turn));
    }
    if (j.contains("expect_distinct")) {
        const auto& arr = j.at("expect_distinct");
        if (!arr.is_array()) throw ValidationError("expect_distinct", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto path = index_path("expect_distinct", i);
            const int idx = detail::as<int>(arr[i], path);
            if (idx < 0 || idx >= static_cast<int>(s.turns.size())) {
                throw ValidationError(path, "turn index out of range");
            }
            s.expect_distinct.push_back(idx);
        }
    }
    return s;
}

Script load_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open " + path.string());
    const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_script(content);
    } catch (const ValidationError&) {
        throw;
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

double distinct_rate(const std::vector<std::string>& selection_keys) {
    std::vector<std::string> keys;
    std::copy_if(selection_keys.begin(), selection_keys.end(), std::back_inserter(keys),
                 [](const std::string& k) { return !k.empty(); });
    if (keys.size() < 2) return 0.0;
    std::size_t pairs = 0;
    std::size_t differ = 0;
    for (std::size_t a = 0; a < keys.size(); ++a) {
        for (std::size_t b = a + 1; b < keys.size(); ++b) {
            ++pairs;
            if (keys[a] != keys[b]) ++differ;
        }
    }
    return static_cast<double>(differ) / static_cast<double>(pairs);
}

bool ComparisonReport::all_checks_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const NamedCheck& c) { return c.passed; });
}

namespace {

ConfigOutcome run_one(const Script& script, const AgentConfig& config, const SpaceRegistry& spaces) {
    ConfigOutcome out;
    out.name = config.name;
    try {
        out.transcript = replay(config, script.inputs(), spaces);
        out.transcript_digest = text::digest(dump_document(transcript_to_json(*out.transcript)));
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

ComparisonReport run_matrix(const Script& script, const std::vector<AgentConfig>& configs,
                            const SpaceRegistry& spaces, bool parallel) {
    ComparisonReport report;
    report.script_id = script.id;
    if (parallel) {
        std::vector<std::future<ConfigOutcome>> jobs;
        for (const auto& c : configs) {
            jobs.push_back(std::async(std::launch::async, [&script, &c, &spaces] { return run_one(script, c, spaces); }));
        }
        for (auto& job : jobs) report.configs.push_back(job.get());
    } else {
        for (const auto& c : configs) report.configs.push_back(run_one(script, c, spaces));
    }

    bool counts_match = true;
    std::vector<std::vector<const TurnResult*>> turns_of;
    for (const auto& outcome : report.configs) {
        turns_of.push_back(outcome.transcript ? outcome.transcript->turns() : std::vector<const TurnResult*>{});
        if (outcome.transcript && turns_of.back().size() != script.turns.size()) counts_match = false;
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < script.turns.size(); ++i) {
        TurnDivergence d;
        d.turn = static_cast<int>(i);
        d.label = script.turns[i].label;
        for (const auto& turns : turns_of) {
            d.selections.push_back(i < turns.size() ? describe_selection(turns[i]->selection) : std::string{});
        }
        d.distinct_rate = distinct_rate(d.selections);
        d.diverged = d.distinct_rate > 0.0;
        sum += d.distinct_rate;
        report.turns.push_back(std::move(d));
    }
    report.distinct_rate = script.turns.empty() ? 0.0 : sum / static_cast<double>(script.turns.size());

    std::vector<std::string> failed;
    for (const auto& outcome : report.configs) {
        if (outcome.error) failed.push_back(outcome.name + ": " + *outcome.error);
    }
    report.checks.push_back({"all_configs_completed", failed.empty(),
                             failed.empty() ? fmt::format("{} configs", configs.size()) : text::join(failed, "; ")});
    report.checks.push_back({"turn_counts_match", counts_match, fmt::format("{} turns", script.turns.size())});
    for (int idx : script.expect_distinct) {
        const auto& d = report.turns.at(static_cast<std::size_t>(idx));
        const auto completed = std::count_if(d.selections.begin(), d.selections.end(),
                                             [](const std::string& s) { return !s.empty(); });
        const bool ok = completed >= 2 && d.distinct_rate == 1.0;
        report.checks.push_back({fmt::format("distinct_turn_{}", idx), ok,
                                 fmt::format("{}: {}", d.label, text::join(d.selections, " | "))});
    }
    return report;
}

std::string render_report_table(const ComparisonReport& report) {
    std::size_t label_width = 5;
    for (const auto& t : report.turns) label_width = std::max(label_width, t.label.size());
    std::vector<std::size_t> widths;
    for (std::size_t c = 0; c < report.configs.size(); ++c) {
        std::size_t w = report.configs[c].name.size();
        for (const auto& t : report.turns) w = std::max(w, t.selections[c].size());
        widths.push_back(w);
    }
    std::string out = fmt::format("script: {}\n{:<{}}", report.script_id, "turn", label_width);
    for (std::size_t c = 0; c < report.configs.size(); ++c) {
        out += fmt::format("  {:<{}}", report.configs[c].name, widths[c]);
    }
    out += "  distinct\n";
    for (const auto& t : report.turns) {
        out += fmt::format("{:<{}}", t.label, label_width);
        for (std::size_t c = 0; c < t.selections.size(); ++c) {
            out += fmt::format("  {:<{}}", t.selections[c].empty() ? "-" : t.selections[c], widths[c]);
        }
        out += fmt::format("  {:.2f}\n", t.distinct_rate);
    }
    out += fmt::format("mean distinct rate: {:.2f}\n", report.distinct_rate);
    for (const auto& c : report.checks) {
        out += fmt::format("[{}] {}  {}\n", c.passed ? "ok" : "FAIL", c.name, c.detail);
    }
    return out;
}

}  // namespace robochar
