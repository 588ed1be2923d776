#include "robochar/llm/payload.hpp"

#include "robochar/errors.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace robochar::llm {

namespace {

using nlohmann::json;

json extract_object(std::string_view stage, std::string_view raw) {
    const auto open = raw.find('{');
    const auto close = raw.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        throw ParseError(fmt::format("{} payload: no JSON object in reply", stage));
    }
    try {
        return json::parse(raw.substr(open, close - open + 1));
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("{} payload: malformed JSON ({})", stage, e.what()));
    }
}

const json& require(const json& obj, std::string_view stage, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        throw ParseError(fmt::format("{} payload: missing key '{}'", stage, key));
    }
    return *it;
}

double bounded(const json& obj, std::string_view stage, const char* key, double lo, double hi) {
    const json& v = require(obj, stage, key);
    if (!v.is_number()) throw ParseError(fmt::format("{} payload: '{}' must be a number", stage, key));
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) {
        throw ParseError(fmt::format("{} payload: '{}' = {} outside [{}, {}]", stage, key, x, lo, hi));
    }
    return x;
}

std::string string_field(const json& obj, std::string_view stage, const char* key) {
    const json& v = require(obj, stage, key);
    if (!v.is_string()) throw ParseError(fmt::format("{} payload: '{}' must be a string", stage, key));
    return v.get<std::string>();
}

std::string optional_string(const json& obj, std::string_view stage, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw ParseError(fmt::format("{} payload: '{}' must be a string", stage, key));
    return it->get<std::string>();
}

}  // namespace

TraitLevels parse_persona_levels(std::string_view raw) {
    constexpr std::string_view stage = "describe_persona";
    const json obj = extract_object(stage, raw);
    TraitLevels levels;
    for (auto trait : kAllTraits) {
        const std::string key(trait_key(trait));
        const json& v = require(obj, stage, key.c_str());
        if (!v.is_string()) throw ParseError(fmt::format("{} payload: '{}' must be a level name", stage, key));
        const auto level = parse_level(v.get<std::string>());
        if (!level) {
            throw ParseError(fmt::format("{} payload: '{}' has unknown level '{}'", stage, key,
                                         v.get<std::string>()));
        }
        levels.set(trait, *level);
    }
    return levels;
}

AppraisalRecord parse_appraisal(std::string_view raw) {
    constexpr std::string_view stage = "appraise";
    const json obj = extract_object(stage, raw);
    AppraisalRecord a;
    a.relevance = bounded(obj, stage, "relevance", 0.0, 1.0);
    a.valence = bounded(obj, stage, "valence", -1.0, 1.0);
    a.impact = bounded(obj, stage, "impact", 0.0, 1.0);
    a.inferred_intent = string_field(obj, stage, "inferred_intent");
    a.rationale = optional_string(obj, stage, "rationale");
    return a;
}

ActionSelection parse_selection(std::string_view raw) {
    constexpr std::string_view stage = "select_action";
    const json obj = extract_object(stage, raw);
    ActionSelection s;
    s.action_id = string_field(obj, stage, "action_id");
    const json& bindings = require(obj, stage, "bindings");
    if (!bindings.is_object()) throw ParseError("select_action payload: 'bindings' must be an object");
    for (const auto& [k, v] : bindings.items()) {
        if (!v.is_string()) {
            throw ParseError(fmt::format("select_action payload: binding '{}' must be a string", k));
        }
        s.bindings.emplace(k, v.get<std::string>());
    }
    s.utterance = string_field(obj, stage, "utterance");
    s.rationale = optional_string(obj, stage, "rationale");
    return s;
}

ReflectionPayload parse_reflection(std::string_view raw) {
    constexpr std::string_view stage = "reflect";
    const json obj = extract_object(stage, raw);
    const json& list = require(obj, stage, "insights");
    if (!list.is_array()) throw ParseError("reflect payload: 'insights' must be an array");
    ReflectionPayload out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const json& item = list[i];
        const std::string where = fmt::format("reflect insights[{}]", i);
        if (!item.is_object()) throw ParseError(where + " payload: must be an object");
        ReflectionInsight insight;
        insight.statement = string_field(item, where, "statement");
        if (insight.statement.empty()) throw ParseError(where + " payload: 'statement' is empty");
        const json& support = require(item, where, "supporting");
        if (!support.is_array() || support.empty()) {
            throw ParseError(where + " payload: 'supporting' must be a non-empty array");
        }
        for (const auto& n : support) {
            if (!n.is_number_integer()) throw ParseError(where + " payload: 'supporting' entries must be integers");
            insight.supporting.push_back(n.get<int>());
        }
        insight.confidence = bounded(item, where, "confidence", 0.0, 1.0);
        out.insights.push_back(std::move(insight));
    }
    return out;
}

StructuredPayload parse_payload(Stage stage, std::string_view raw) {
    switch (stage) {
        case Stage::DescribePersona: return parse_persona_levels(raw);
        case Stage::Appraise: return parse_appraisal(raw);
        case Stage::SelectAction: return parse_selection(raw);
        case Stage::Reflect: return parse_reflection(raw);
    }
    throw ParseError("unknown stage");
}

std::string serialize_payload(const StructuredPayload& payload) {
    json j;
    if (const auto* levels = std::get_if<TraitLevels>(&payload)) {
        for (auto trait : kAllTraits) j[std::string(trait_key(trait))] = level_name(levels->get(trait));
    } else if (const auto* a = std::get_if<AppraisalRecord>(&payload)) {
        j = {{"relevance", a->relevance},
             {"valence", a->valence},
             {"impact", a->impact},
             {"inferred_intent", a->inferred_intent},
             {"rationale", a->rationale}};
    } else if (const auto* s = std::get_if<ActionSelection>(&payload)) {
        j = {{"action_id", s->action_id},
             {"bindings", s->bindings},
             {"utterance", s->utterance},
             {"rationale", s->rationale}};
    } else if (const auto* r = std::get_if<ReflectionPayload>(&payload)) {
        j["insights"] = json::array();
        for (const auto& insight : r->insights) {
            j["insights"].push_back({{"statement", insight.statement},
                                     {"supporting", insight.supporting},
                                     {"confidence", insight.confidence}});
        }
    }
    return j.dump();
}

std::string_view output_schema_text(Stage stage) {
    switch (stage) {
        case Stage::DescribePersona:
            return R"({"openness": "<level>", "conscientiousness": "<level>", "extraversion": "<level>", )"
                   R"("agreeableness": "<level>", "neuroticism": "<level>"})";
        case Stage::Appraise:
            return R"({"relevance": <0..1>, "valence": <-1..1>, "impact": <0..1>, )"
                   R"("inferred_intent": "<what the human means>", "rationale": "<short reasoning>"})";
        case Stage::SelectAction:
            return R"({"action_id": "<id from the action space>", "bindings": {"<parameter>": "<value>"}, )"
                   R"("utterance": "<what you say>", "rationale": "<short reasoning>"})";
        case Stage::Reflect:
            return R"({"insights": [{"statement": "<insight>", "supporting": [<episode numbers>], )"
                   R"("confidence": <0..1>}]})";
    }
    return "";
}

}  // namespace robochar::llm
