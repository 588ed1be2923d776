#include "robochar/llm/mock_backend.hpp"

#include "robochar/action_space.hpp"
#include "robochar/emotion.hpp"
#include "robochar/errors.hpp"
#include "robochar/llm/payload.hpp"
#include "robochar/persona.hpp"
#include "robochar/text.hpp"
#include "shipped_data.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

namespace robochar::llm {

using nlohmann::json;

namespace {

struct TraitBound {
    Trait trait = Trait::Openness;
    std::optional<TraitLevel> min;
    std::optional<TraitLevel> max;
};

enum class ValenceClass { Negative, Positive, NonNegative };

struct Predicate {
    std::vector<std::string> input_any;
    std::vector<std::string> memory_any;
    std::vector<std::string> memory_none;
    std::vector<std::string> intent_any;
    std::vector<std::string> emotion_any;
    std::optional<bool> conflict;
    std::optional<bool> memory_empty;
    std::optional<ValenceClass> valence;
    std::vector<TraitBound> traits;
};

struct IntentRule {
    std::string id;
    Predicate when;
    std::string intent;
    std::optional<double> valence;
    std::optional<double> impact;
};

struct SelectRule {
    std::string id;
    Predicate when;
    std::string action;
    std::map<std::string, std::string> bindings;
    std::vector<std::string> utterances;
    std::string rationale;
};

struct ReflectRule {
    std::string id;
    std::vector<std::string> actions_any;
    std::vector<std::string> emotions_any;
    std::vector<std::string> text_any;
    std::optional<double> min_reaction_valence;
    std::optional<double> max_human_valence;
    int min_support = 1;
    std::string statement;
    double confidence_base = 0.5;
    double confidence_per_episode = 0.1;
};

// What the mock reads out of a bundle.
struct Facts {
    std::string utterance;
    std::vector<std::string> cues;
    std::string memory;  // empty when the sentinel is present
    std::string intent;
    std::string emotion;
    double valence = 0.0;
    bool conflict = false;
    TraitLevels traits;
};

std::vector<std::string> strings(const json& j, const char* key) {
    std::vector<std::string> out;
    if (j.contains(key)) {
        for (const auto& s : j.at(key)) out.push_back(s.get<std::string>());
    }
    return out;
}

TraitLevel level_or_throw(const std::string& name) {
    const auto level = parse_level(name);
    if (!level) throw ParseError("mock rules: unknown trait level '" + name + "'");
    return *level;
}

Predicate parse_predicate(const json& j) {
    Predicate p;
    p.input_any = strings(j, "input_any");
    p.memory_any = strings(j, "memory_any");
    p.memory_none = strings(j, "memory_none");
    p.intent_any = strings(j, "intent_any");
    p.emotion_any = strings(j, "emotion_any");
    if (j.contains("conflict")) p.conflict = j.at("conflict").get<bool>();
    if (j.contains("memory_empty")) p.memory_empty = j.at("memory_empty").get<bool>();
    if (j.contains("valence")) {
        const auto v = j.at("valence").get<std::string>();
        if (v == "negative") p.valence = ValenceClass::Negative;
        else if (v == "positive") p.valence = ValenceClass::Positive;
        else if (v == "nonnegative") p.valence = ValenceClass::NonNegative;
        else throw ParseError("mock rules: unknown valence class '" + v + "'");
    }
    if (j.contains("traits")) {
        for (const auto& [name, bound] : j.at("traits").items()) {
            const auto trait = parse_trait(name);
            if (!trait) throw ParseError("mock rules: unknown trait '" + name + "'");
            TraitBound b{*trait, std::nullopt, std::nullopt};
            if (bound.contains("min")) b.min = level_or_throw(bound.at("min").get<std::string>());
            if (bound.contains("max")) b.max = level_or_throw(bound.at("max").get<std::string>());
            p.traits.push_back(b);
        }
    }
    return p;
}

bool any_in(std::string_view haystack, const std::vector<std::string>& needles) {
    return std::any_of(needles.begin(), needles.end(),
                       [&](const std::string& n) { return text::contains(haystack, n); });
}

bool matches(const Predicate& p, const Facts& f) {
    if (!p.input_any.empty() && !any_in(f.utterance, p.input_any)) return false;
    if (!p.memory_any.empty() && !any_in(f.memory, p.memory_any)) return false;
    if (!p.memory_none.empty() && any_in(f.memory, p.memory_none)) return false;
    if (!p.intent_any.empty() && !any_in(f.intent, p.intent_any)) return false;
    if (!p.emotion_any.empty() &&
        std::find(p.emotion_any.begin(), p.emotion_any.end(), f.emotion) == p.emotion_any.end()) {
        return false;
    }
    if (p.conflict && *p.conflict != f.conflict) return false;
    if (p.memory_empty && *p.memory_empty != f.memory.empty()) return false;
    if (p.valence) {
        switch (*p.valence) {
            case ValenceClass::Negative:
                if (!(f.valence < 0.0)) return false;
                break;
            case ValenceClass::Positive:
                if (!(f.valence > 0.0)) return false;
                break;
            case ValenceClass::NonNegative:
                if (f.valence < 0.0) return false;
                break;
        }
    }
    for (const auto& b : p.traits) {
        const auto level = f.traits.get(b.trait);
        if (b.min && level < *b.min) return false;
        if (b.max && level > *b.max) return false;
    }
    return true;
}

double round2(double x) {
    const double r = std::round(x * 100.0) / 100.0;
    return r == 0.0 ? 0.0 : r;
}

double clamp01(double x) {
    return std::clamp(x, 0.0, 1.0);
}

std::optional<double> number_after(std::string_view line, std::string_view key) {
    const auto pos = line.find(key);
    if (pos == std::string_view::npos) return std::nullopt;
    try {
        return std::stod(std::string(line.substr(pos + key.size())));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

Facts read_facts(const PromptBundle& bundle) {
    Facts f;
    f.traits = robochar::parse_persona_levels(bundle.section(SectionTag::Persona));
    const auto memory = bundle.section(SectionTag::MemoryContext);
    if (memory != kNoMemories) f.memory = std::string(memory);

    std::istringstream in{std::string(bundle.section(SectionTag::HumanInput))};
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("Utterance: ")) {
            f.utterance = line.substr(11);
        } else if (line.starts_with("Cue: ")) {
            f.cues.push_back(line.substr(5));
        } else if (line.starts_with("Intent: ")) {
            f.intent = line.substr(8);
        } else if (line.starts_with("Emotion: ")) {
            const auto rest = line.substr(9);
            f.emotion = rest.substr(0, rest.find(' '));
        } else if (line.starts_with("Appraisal: ")) {
            if (auto v = number_after(line, "valence=")) f.valence = *v;
        }
    }
    return f;
}

}  // namespace

struct MockRules {
    TraitLevel default_level = TraitLevel::Medium;
    std::vector<std::pair<std::string, std::vector<std::pair<Trait, TraitLevel>>>> keywords;
    std::vector<IntentRule> intents;
    std::vector<SelectRule> selects;
    std::vector<ReflectRule> reflects;

    static std::shared_ptr<const MockRules> parse(std::string_view document) {
        json j;
        try {
            j = json::parse(document);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("mock rules: ") + e.what());
        }
        auto rules = std::make_shared<MockRules>();
        try {
            const auto& describe = j.at("describe_persona");
            rules->default_level = level_or_throw(describe.value("default_level", "Medium"));
            for (const auto& [word, traits] : describe.at("keywords").items()) {
                std::vector<std::pair<Trait, TraitLevel>> assigns;
                for (const auto& [name, level] : traits.items()) {
                    const auto trait = parse_trait(name);
                    if (!trait) throw ParseError("mock rules: unknown trait '" + name + "'");
                    assigns.emplace_back(*trait, level_or_throw(level.get<std::string>()));
                }
                rules->keywords.emplace_back(text::normalize(word), std::move(assigns));
            }
            for (const auto& r : j.at("appraise").at("intent_rules")) {
                IntentRule rule;
                rule.id = r.at("id").get<std::string>();
                rule.when = parse_predicate(r.at("when"));
                rule.intent = r.at("intent").get<std::string>();
                if (r.contains("valence")) rule.valence = r.at("valence").get<double>();
                if (r.contains("impact")) rule.impact = r.at("impact").get<double>();
                rules->intents.push_back(std::move(rule));
            }
            for (const auto& r : j.at("select_action")) {
                SelectRule rule;
                rule.id = r.at("id").get<std::string>();
                rule.when = parse_predicate(r.at("when"));
                rule.action = r.at("action").get<std::string>();
                rule.bindings = r.value("bindings", std::map<std::string, std::string>{});
                rule.utterances = strings(r, "utterances");
                if (rule.utterances.empty()) throw ParseError("mock rules: " + rule.id + " has no utterances");
                rule.rationale = r.value("rationale", std::string{});
                rules->selects.push_back(std::move(rule));
            }
            for (const auto& r : j.at("reflect")) {
                ReflectRule rule;
                rule.id = r.at("id").get<std::string>();
                const auto& m = r.at("match");
                rule.actions_any = strings(m, "actions_any");
                rule.emotions_any = strings(m, "emotions_any");
                rule.text_any = strings(m, "text_any");
                if (m.contains("min_reaction_valence")) rule.min_reaction_valence = m.at("min_reaction_valence").get<double>();
                if (m.contains("max_human_valence")) rule.max_human_valence = m.at("max_human_valence").get<double>();
                rule.min_support = r.value("min_support", 1);
                rule.statement = r.at("statement").get<std::string>();
                rule.confidence_base = r.value("confidence_base", 0.5);
                rule.confidence_per_episode = r.value("confidence_per_episode", 0.1);
                rules->reflects.push_back(std::move(rule));
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("mock rules: ") + e.what());
        }
        return rules;
    }
};

namespace {

std::string describe_reply(const MockRules& rules, const PromptBundle& bundle) {
    TraitLevels levels{rules.default_level, rules.default_level, rules.default_level,
                       rules.default_level, rules.default_level};
    const auto words = text::words(bundle.section(SectionTag::Persona));
    for (const auto& [word, assigns] : rules.keywords) {
        if (std::find(words.begin(), words.end(), word) == words.end()) continue;
        for (const auto& [trait, level] : assigns) levels.set(trait, level);
    }
    return serialize_payload(levels);
}

std::string appraise_reply(const MockRules& rules, const Lexicon& lexicon, const PromptBundle& bundle) {
    Facts f = read_facts(bundle);
    const LexiconScore words = lexicon.score(f.utterance);
    LexiconScore cues;
    for (const auto& cue : f.cues) cues += lexicon.score(cue);

    f.conflict = words.matches > 0 && cues.matches > 0 && words.valence() * cues.valence() < 0.0;
    LexiconScore pooled = words;
    pooled += cues;
    // Cue sign wins on conflict, with the cue magnitude.
    double valence = f.conflict ? cues.valence() : pooled.valence();
    f.valence = valence;

    const IntentRule* hit = nullptr;
    for (const auto& rule : rules.intents) {
        if (matches(rule.when, f)) {
            hit = &rule;
            break;
        }
    }
    std::optional<double> impact;
    std::string intent = "Statement taken at face value.";
    if (hit) {
        intent = hit->intent;
        if (hit->valence) valence = *hit->valence;
        impact = hit->impact;
    }
    const double magnitude = std::abs(valence);
    const double relevance = clamp01(0.3 + 0.5 * magnitude + (f.memory.empty() ? 0.0 : 0.2));

    AppraisalRecord record;
    record.relevance = round2(relevance);
    record.valence = round2(valence);
    record.impact = round2(impact.value_or(clamp01(0.2 + 0.8 * magnitude)));
    record.inferred_intent = intent;
    record.rationale = fmt::format("words {} ({} matches), cues {} ({} matches){}; rule {}",
                                   text::fixed(words.valence()), words.matches,
                                   text::fixed(cues.valence()), cues.matches,
                                   f.conflict ? ", words and cues conflict" : "",
                                   hit ? hit->id : "none");
    return serialize_payload(record);
}

std::string select_reply(const MockRules& rules, const PromptBundle& bundle, std::uint64_t seed) {
    const Facts f = read_facts(bundle);
    const auto declared = parse_space_action_ids(bundle.section(SectionTag::Task));
    for (const auto& rule : rules.selects) {
        if (!declared.empty() &&
            std::find(declared.begin(), declared.end(), rule.action) == declared.end()) {
            continue;
        }
        if (!matches(rule.when, f)) continue;
        const auto pick = text::fnv1a64(std::to_string(seed) + '\n' + bundle.render()) % rule.utterances.size();
        ActionSelection s;
        s.action_id = rule.action;
        s.bindings = rule.bindings;
        s.utterance = rule.utterances[pick];
        s.rationale = rule.rationale;
        return serialize_payload(s);
    }
    ActionSelection s;
    s.utterance = "I am listening.";
    s.rationale = "No rule matched.";
    return serialize_payload(s);
}

struct EpisodeFacts {
    int index = 0;
    std::string line;
    std::string action;
    std::string emotion;
    double human_valence = 0.0;
    double reaction_valence = 0.0;
};

std::vector<EpisodeFacts> read_episodes(std::string_view memory) {
    static const std::regex numbered(R"(^(\d+)\. (.*)$)");
    static const std::regex action(R"( action=([a-z_]+))");
    static const std::regex emotion(R"( emotion=([a-z]+))");
    std::vector<EpisodeFacts> out;
    std::istringstream in{std::string(memory)};
    std::string line;
    std::smatch m;
    while (std::getline(in, line)) {
        if (!std::regex_match(line, m, numbered)) continue;
        EpisodeFacts e;
        e.index = std::stoi(m[1].str());
        e.line = m[2].str();
        if (e.line.find(" human=") == std::string::npos) continue;
        if (std::regex_search(e.line, m, action)) e.action = m[1].str();
        if (std::regex_search(e.line, m, emotion)) e.emotion = m[1].str();
        e.human_valence = number_after(e.line, " human_valence=").value_or(0.0);
        e.reaction_valence = number_after(e.line, " reaction_valence=").value_or(0.0);
        out.push_back(std::move(e));
    }
    return out;
}

bool episode_matches(const ReflectRule& rule, const EpisodeFacts& e) {
    const bool has_kind = !rule.actions_any.empty() || !rule.emotions_any.empty();
    if (has_kind) {
        const bool by_action =
            std::find(rule.actions_any.begin(), rule.actions_any.end(), e.action) != rule.actions_any.end();
        const bool by_emotion =
            std::find(rule.emotions_any.begin(), rule.emotions_any.end(), e.emotion) != rule.emotions_any.end();
        if (!by_action && !by_emotion) return false;
    }
    if (rule.min_reaction_valence && e.reaction_valence < *rule.min_reaction_valence) return false;
    if (rule.max_human_valence && e.human_valence > *rule.max_human_valence) return false;
    if (!rule.text_any.empty() && !any_in(e.line, rule.text_any)) return false;
    return true;
}

std::string reflect_reply(const MockRules& rules, const PromptBundle& bundle) {
    const auto episodes = read_episodes(bundle.section(SectionTag::MemoryContext));
    const auto known = bundle.section(SectionTag::HumanInput);
    ReflectionPayload payload;
    for (const auto& rule : rules.reflects) {
        if (known.find(rule.statement) != std::string_view::npos) continue;
        ReflectionInsight insight;
        for (const auto& e : episodes) {
            if (episode_matches(rule, e)) insight.supporting.push_back(e.index);
        }
        if (insight.supporting.empty() || static_cast<int>(insight.supporting.size()) < rule.min_support) {
            continue;
        }
        insight.statement = rule.statement;
        insight.confidence = round2(clamp01(rule.confidence_base + rule.confidence_per_episode *
                                                                       static_cast<double>(insight.supporting.size())));
        payload.insights.push_back(std::move(insight));
    }
    return serialize_payload(payload);
}

}  // namespace

MockBackend::MockBackend(BackendConfig config)
    : Backend(std::move(config)), lexicon_(Lexicon::shipped()) {
    static const auto shipped_rules = MockRules::parse(shipped::mock_rules_json());
    rules_ = shipped_rules;
}

MockBackend::MockBackend(BackendConfig config, std::string_view rules_json, Lexicon lexicon)
    : Backend(std::move(config)), rules_(MockRules::parse(rules_json)), lexicon_(std::move(lexicon)) {}

MockBackend::~MockBackend() = default;

std::string MockBackend::respond(const PromptBundle& bundle) const {
    switch (bundle.stage) {
        case Stage::DescribePersona: return describe_reply(*rules_, bundle);
        case Stage::Appraise: return appraise_reply(*rules_, lexicon_, bundle);
        case Stage::SelectAction: return select_reply(*rules_, bundle, config().seed);
        case Stage::Reflect: return reflect_reply(*rules_, bundle);
    }
    return "{}";
}

}  // namespace robochar::llm
