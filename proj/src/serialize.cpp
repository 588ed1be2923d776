#include "robochar/serialize.hpp"

#include "json_fields.hpp"
#include "robochar/errors.hpp"
#include "robochar/text.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

namespace robochar {

namespace llm {

void to_json(json& j, const StageRecord& r) {
    j = json{{"stage", r.stage},       {"prompt_hash", r.prompt_hash}, {"response_hash", r.response_hash},
             {"response", r.response}, {"attempts", r.attempts},       {"fallback", r.fallback},
             {"note", r.note}};
}

void from_json(const json& j, StageRecord& r) {
    r.stage = j.at("stage").get<std::string>();
    r.prompt_hash = j.value("prompt_hash", "");
    r.response_hash = j.value("response_hash", "");
    r.response = j.value("response", "");
    r.attempts = j.value("attempts", 0);
    r.fallback = j.value("fallback", false);
    r.note = j.value("note", "");
}

}  // namespace llm

using detail::as;
using detail::index_path;
using detail::join_path;
using detail::optional_or;
using detail::required;

void to_json(json& j, const EmotionState& e) {
    j = json{{"label", emotion_name(e.label)}, {"intensity", e.intensity}, {"valence", e.valence},
             {"arousal", e.arousal}};
}

void from_json(const json& j, EmotionState& e) {
    const auto name = j.at("label").get<std::string>();
    const auto label = parse_emotion(name);
    if (!label) throw ParseError("unknown emotion label '" + name + "'");
    e.label = *label;
    e.intensity = j.at("intensity").get<double>();
    e.valence = j.at("valence").get<double>();
    e.arousal = j.at("arousal").get<double>();
}

void to_json(json& j, const AppraisalRecord& a) {
    j = json{{"relevance", a.relevance},
             {"valence", a.valence},
             {"impact", a.impact},
             {"inferred_intent", a.inferred_intent},
             {"rationale", a.rationale}};
}

void from_json(const json& j, AppraisalRecord& a) {
    a.relevance = j.at("relevance").get<double>();
    a.valence = j.at("valence").get<double>();
    a.impact = j.at("impact").get<double>();
    a.inferred_intent = j.value("inferred_intent", "");
    a.rationale = j.value("rationale", "");
}

void to_json(json& j, const ActionSelection& s) {
    j = json{{"action_id", s.action_id}, {"bindings", s.bindings}, {"utterance", s.utterance},
             {"rationale", s.rationale}};
}

void from_json(const json& j, ActionSelection& s) {
    s.action_id = j.at("action_id").get<std::string>();
    s.bindings = j.value("bindings", std::map<std::string, std::string>{});
    s.utterance = j.value("utterance", "");
    s.rationale = j.value("rationale", "");
}

void to_json(json& j, const HumanInput& in) {
    j = json{{"utterance", in.utterance}, {"cues", in.cues}, {"day", in.day}, {"timestamp", in.timestamp},
             {"observed_reaction", in.observed_reaction}};
}

void from_json(const json& j, HumanInput& in) {
    in.utterance = j.value("utterance", "");
    in.cues = j.value("cues", std::vector<std::string>{});
    in.day = j.value("day", 1);
    in.timestamp = j.value("timestamp", std::int64_t{0});
    in.observed_reaction = j.value("observed_reaction", "");
}

void to_json(json& j, const EpisodicRecord& r) {
    j = json{{"id", r.id},
             {"day", r.day},
             {"timestamp", r.timestamp},
             {"human_action", r.human_action},
             {"human_valence", r.human_valence},
             {"robot_emotion", r.robot_emotion},
             {"robot_response", r.robot_response},
             {"observed_reaction", r.observed_reaction},
             {"reaction_valence", r.reaction_valence},
             {"importance", r.importance}};
}

void from_json(const json& j, EpisodicRecord& r) {
    r.id = j.at("id").get<std::string>();
    r.day = j.at("day").get<int>();
    r.timestamp = j.at("timestamp").get<std::int64_t>();
    r.human_action = j.at("human_action").get<std::string>();
    r.human_valence = j.at("human_valence").get<double>();
    r.robot_emotion = j.at("robot_emotion").get<EmotionState>();
    r.robot_response = j.at("robot_response").get<ActionSelection>();
    r.observed_reaction = j.value("observed_reaction", "");
    r.reaction_valence = j.value("reaction_valence", 0.0);
    r.importance = j.at("importance").get<double>();
}

void to_json(json& j, const SemanticMemory& m) {
    j = json{{"id", m.id},
             {"statement", m.statement},
             {"supporting_episodes", m.supporting_episodes},
             {"created_day", m.created_day},
             {"created_at", m.created_at},
             {"confidence", m.confidence}};
}

void from_json(const json& j, SemanticMemory& m) {
    m.id = j.at("id").get<std::string>();
    m.statement = j.at("statement").get<std::string>();
    m.supporting_episodes = j.at("supporting_episodes").get<std::vector<std::string>>();
    m.created_day = j.at("created_day").get<int>();
    m.created_at = j.value("created_at", std::int64_t{0});
    m.confidence = j.at("confidence").get<double>();
}

void to_json(json& j, const RetrievedMemory& m) {
    j = json{{"kind", m.kind == MemoryKind::Episodic ? "episodic" : "semantic"},
             {"id", m.id},
             {"text", m.text},
             {"day", m.day},
             {"timestamp", m.timestamp},
             {"recency", m.recency},
             {"importance", m.importance},
             {"relevance", m.relevance},
             {"score", m.score}};
}

void from_json(const json& j, RetrievedMemory& m) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind != "episodic" && kind != "semantic") throw ParseError("unknown memory kind '" + kind + "'");
    m.kind = kind == "episodic" ? MemoryKind::Episodic : MemoryKind::Semantic;
    m.id = j.at("id").get<std::string>();
    m.text = j.at("text").get<std::string>();
    m.day = j.at("day").get<int>();
    m.timestamp = j.at("timestamp").get<std::int64_t>();
    m.recency = j.at("recency").get<double>();
    m.importance = j.at("importance").get<double>();
    m.relevance = j.at("relevance").get<double>();
    m.score = j.at("score").get<double>();
}

void to_json(json& j, const TurnResult& t) {
    j = json{{"input", t.input},
             {"retrieved", t.retrieved},
             {"appraisal", t.appraisal},
             {"emotion", t.emotion},
             {"selection", t.selection},
             {"episode_id", t.episode_id ? json(*t.episode_id) : json(nullptr)},
             {"trace", t.trace}};
}

void from_json(const json& j, TurnResult& t) {
    t.input = j.at("input").get<HumanInput>();
    t.retrieved = j.at("retrieved").get<std::vector<RetrievedMemory>>();
    t.appraisal = j.at("appraisal").get<AppraisalRecord>();
    t.emotion = j.at("emotion").get<EmotionState>();
    t.selection = j.at("selection").get<ActionSelection>();
    const auto& ep = j.at("episode_id");
    t.episode_id = ep.is_null() ? std::nullopt : std::optional<std::string>(ep.get<std::string>());
    t.trace = j.at("trace").get<std::vector<llm::StageRecord>>();
}

void to_json(json& j, const DayReflection& r) {
    j = json{{"day", r.day}, {"memories", r.memories}, {"trace", r.trace ? json(*r.trace) : json(nullptr)}};
}

void from_json(const json& j, DayReflection& r) {
    r.day = j.at("day").get<int>();
    r.memories = j.at("memories").get<std::vector<SemanticMemory>>();
    const auto& tr = j.at("trace");
    r.trace = tr.is_null() ? std::nullopt : std::optional<llm::StageRecord>(tr.get<llm::StageRecord>());
}

void to_json(json& j, const Clock& c) {
    j = json{{"day", c.day}, {"turn", c.turn}};
}

void from_json(const json& j, Clock& c) {
    c.day = j.at("day").get<int>();
    c.turn = j.at("turn").get<int>();
}

void to_json(json& j, const Violation& v) {
    j = json{{"kind", violation_name(v.kind)}, {"subject", v.subject}, {"message", v.message}};
}

json profile_to_json(const PersonalityProfile& profile) {
    json j;
    for (auto t : kAllTraits) j[std::string(trait_key(t))] = level_name(profile.level(t));
    j["descriptors"] = profile.descriptors();
    j["provenance"] = provenance_name(profile.provenance());
    return j;
}

PersonalityProfile profile_from_json(const json& j, const std::string& path, llm::Backend* describer) {
    detail::require_object(j, path);
    if (j.contains("description")) {
        const auto text = required<std::string>(j, path, "description");
        if (text::trim(text).empty()) throw ValidationError(join_path(path, "description"), "must be non-empty");
        if (!describer) throw ValidationError(join_path(path, "description"), "needs a backend to interpret");
        return from_description(text, *describer);
    }
    if (j.contains("random_seed")) {
        return random_profile(required<std::uint64_t>(j, path, "random_seed"));
    }
    TraitLevels levels;
    for (auto t : kAllTraits) {
        const std::string key(trait_key(t));
        const auto field = join_path(path, key);
        if (!j.contains(key)) throw ValidationError(field, "is required");
        const auto& v = j.at(key);
        std::optional<TraitLevel> level;
        if (v.is_string()) level = parse_level(v.get<std::string>());
        else if (v.is_number()) level = level_from_numeric(v.get<double>());
        if (!level) throw ValidationError(field, "expected one of Low, Medium-low, Medium, Medium-high, High");
        levels.set(t, *level);
    }
    auto descriptors = detail::string_list(j, path, "descriptors");
    Provenance provenance = Provenance::Parametric;
    if (j.contains("provenance")) {
        const auto p = parse_provenance(required<std::string>(j, path, "provenance"));
        if (!p) throw ValidationError(join_path(path, "provenance"), "unknown provenance");
        provenance = *p;
    }
    try {
        return PersonalityProfile(levels, std::move(descriptors), provenance);
    } catch (const PreconditionError& e) {
        throw ValidationError(join_path(path, "descriptors"), e.what());
    }
}

json backend_to_json(const llm::BackendConfig& c) {
    return json{{"kind", c.kind == llm::BackendKind::Mock ? "mock" : "http"},
                {"model", c.model},
                {"temperature", c.temperature},
                {"seed", c.seed},
                {"retry_budget", c.retry_budget},
                {"timeout_ms", c.timeout.count()},
                {"backoff_ms", c.backoff_base.count()},
                {"endpoint", c.endpoint},
                {"api_key_env", c.api_key_env}};
}

llm::BackendConfig backend_from_json(const json& j, const std::string& path) {
    detail::require_object(j, path);
    llm::BackendConfig c;
    const auto kind = optional_or<std::string>(j, path, "kind", "mock");
    if (kind == "mock") c.kind = llm::BackendKind::Mock;
    else if (kind == "http") c.kind = llm::BackendKind::Http;
    else throw ValidationError(join_path(path, "kind"), "expected 'mock' or 'http'");
    c.model = optional_or<std::string>(j, path, "model", c.model);
    c.temperature = optional_or<double>(j, path, "temperature", c.temperature);
    c.seed = optional_or<std::uint64_t>(j, path, "seed", c.seed);
    c.retry_budget = optional_or<int>(j, path, "retry_budget", c.retry_budget);
    c.timeout = std::chrono::milliseconds(optional_or<std::int64_t>(j, path, "timeout_ms", c.timeout.count()));
    c.backoff_base =
        std::chrono::milliseconds(optional_or<std::int64_t>(j, path, "backoff_ms", c.backoff_base.count()));
    c.endpoint = optional_or<std::string>(j, path, "endpoint", c.endpoint);
    c.api_key_env = optional_or<std::string>(j, path, "api_key_env", c.api_key_env);
    c.validate();
    return c;
}

json config_to_json(const AgentConfig& c) {
    return json{{"schema_version", kSchemaVersion},
                {"name", c.name},
                {"profile", profile_to_json(c.profile)},
                {"space_id", c.space_id},
                {"backend", backend_to_json(c.backend)},
                {"ablation",
                 {{"memory_enabled", c.ablation.memory_enabled}, {"emotion_enabled", c.ablation.emotion_enabled}}},
                {"retrieval",
                 {{"top_k", c.retrieval.top_k},
                  {"lambda_per_day", c.retrieval.decay.lambda_per_day},
                  {"days_per_tick", c.retrieval.decay.days_per_tick}}}};
}

AgentConfig config_from_json(const json& j) {
    detail::check_schema_version(j, kSchemaVersion);
    AgentConfig c;
    c.name = required<std::string>(j, "", "name");
    if (text::trim(c.name).empty()) throw ValidationError("name", "must be non-empty");
    c.space_id = optional_or<std::string>(j, "", "space_id", c.space_id);
    if (j.contains("backend")) c.backend = backend_from_json(j.at("backend"), "backend");
    if (j.contains("ablation")) {
        const auto& a = j.at("ablation");
        detail::require_object(a, "ablation");
        c.ablation.memory_enabled = optional_or<bool>(a, "ablation", "memory_enabled", true);
        c.ablation.emotion_enabled = optional_or<bool>(a, "ablation", "emotion_enabled", true);
    }
    if (j.contains("retrieval")) {
        const auto& r = j.at("retrieval");
        detail::require_object(r, "retrieval");
        c.retrieval.top_k = optional_or<int>(r, "retrieval", "top_k", c.retrieval.top_k);
        c.retrieval.decay.lambda_per_day =
            optional_or<double>(r, "retrieval", "lambda_per_day", c.retrieval.decay.lambda_per_day);
        c.retrieval.decay.days_per_tick =
            optional_or<double>(r, "retrieval", "days_per_tick", c.retrieval.decay.days_per_tick);
    }
    if (c.retrieval.top_k < 1) throw ValidationError("retrieval.top_k", "must be >= 1");
    if (!(c.retrieval.decay.lambda_per_day >= 0.0)) throw ValidationError("retrieval.lambda_per_day", "must be >= 0");
    if (!(c.retrieval.decay.days_per_tick >= 0.0)) throw ValidationError("retrieval.days_per_tick", "must be >= 0");
    if (!j.contains("profile")) throw ValidationError("profile", "is required");
    std::unique_ptr<llm::Backend> describer;
    if (j.at("profile").is_object() && j.at("profile").contains("description")) {
        describer = llm::make_backend(c.backend);
    }
    c.profile = profile_from_json(j.at("profile"), "profile", describer.get());
    return c;
}

AgentConfig load_config(const std::filesystem::path& path) {
    return config_from_json(read_document(path));
}

json space_to_json(const ActionSpace& space) {
    json actions = json::array();
    for (const auto& a : space.actions()) {
        json params = json::array();
        for (const auto& p : a.parameters) params.push_back({{"name", p.name}, {"kind", param_kind_name(p.kind)}});
        actions.push_back({{"id", a.id},
                           {"name", a.name},
                           {"description", a.description},
                           {"parameters", params},
                           {"requires_objects", a.requires_objects}});
    }
    return json{{"schema_version", kSchemaVersion}, {"id", space.id()}, {"inventory", space.inventory()},
                {"actions", actions}};
}

ActionSpace space_from_json(const json& j) {
    detail::check_schema_version(j, kSchemaVersion);
    const auto id = required<std::string>(j, "", "id");
    auto inventory = detail::string_list(j, "", "inventory", true);
    if (!j.contains("actions") || !j.at("actions").is_array()) {
        throw ValidationError("actions", "expected an array");
    }
    std::vector<ActionSpec> actions;
    const auto& arr = j.at("actions");
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto path = index_path("actions", i);
        const auto& a = arr[i];
        detail::require_object(a, path);
        ActionSpec spec;
        spec.id = required<std::string>(a, path, "id");
        spec.name = optional_or<std::string>(a, path, "name", spec.id);
        spec.description = optional_or<std::string>(a, path, "description", "");
        if (a.contains("parameters")) {
            const auto& ps = a.at("parameters");
            const auto ppath = join_path(path, "parameters");
            if (!ps.is_array()) throw ValidationError(ppath, "expected an array");
            for (std::size_t k = 0; k < ps.size(); ++k) {
                const auto kpath = index_path(ppath, k);
                detail::require_object(ps[k], kpath);
                ActionParameter p;
                p.name = required<std::string>(ps[k], kpath, "name");
                const auto kind_text = required<std::string>(ps[k], kpath, "kind");
                const auto kind = parse_param_kind(kind_text);
                if (!kind) throw ValidationError(join_path(kpath, "kind"), "unknown parameter kind '" + kind_text + "'");
                p.kind = *kind;
                spec.parameters.push_back(std::move(p));
            }
        }
        spec.requires_objects = detail::string_list(a, path, "requires_objects");
        actions.push_back(std::move(spec));
    }
    return ActionSpace(id, std::move(actions), std::move(inventory));
}

ActionSpace load_space(const std::filesystem::path& path) {
    return space_from_json(read_document(path));
}

json store_to_json(const MemoryStore& store) {
    return json{{"schema_version", kSchemaVersion},
                {"current_day", store.current_day()},
                {"episodic", store.episodic()},
                {"semantic", store.semantic()}};
}

MemoryStore store_from_json(const json& j) {
    detail::check_schema_version(j, kSchemaVersion);
    try {
        return MemoryStore::restore(j.at("current_day").get<int>(),
                                    j.at("episodic").get<std::vector<EpisodicRecord>>(),
                                    j.at("semantic").get<std::vector<SemanticMemory>>());
    } catch (const json::exception& e) {
        throw ParseError(std::string("memory store: ") + e.what());
    } catch (const PreconditionError& e) {
        throw ParseError(std::string("memory store: ") + e.what());
    } catch (const OrderViolation& e) {
        throw ParseError(std::string("memory store: ") + e.what());
    }
}

json transcript_to_json(const Transcript& transcript) {
    json entries = json::array();
    for (const auto& e : transcript.entries) {
        if (e.turn) entries.push_back({{"type", "turn"}, {"turn", *e.turn}});
        if (e.reflection) entries.push_back({{"type", "reflection"}, {"reflection", *e.reflection}});
    }
    return json{{"schema_version", kSchemaVersion}, {"entries", entries}};
}

json report_to_json(const ComparisonReport& report) {
    json configs = json::array();
    for (const auto& c : report.configs) {
        configs.push_back({{"name", c.name},
                           {"transcript_digest", c.transcript_digest},
                           {"error", c.error ? json(*c.error) : json(nullptr)}});
    }
    json turns = json::array();
    for (const auto& t : report.turns) {
        turns.push_back({{"turn", t.turn},
                         {"label", t.label},
                         {"selections", t.selections},
                         {"distinct_rate", t.distinct_rate},
                         {"diverged", t.diverged}});
    }
    json checks = json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"script_id", report.script_id},
                {"configs", configs},
                {"turns", turns},
                {"distinct_rate", report.distinct_rate},
                {"checks", checks},
                {"all_checks_passed", report.all_checks_passed()}};
}

json parse_document(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        int line = 1;
        int column = 1;
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(fmt::format("line {}, column {}: {}", line, column, e.what()));
    }
}

json read_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_document(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string dump_document(const json& j) {
    return j.dump(2) + "\n";
}

}  // namespace robochar
