#include "robochar/errors.hpp"
#include "robochar/llm/lexicon.hpp"
#include "robochar/llm/payload.hpp"
#include "robochar/llm/prompt.hpp"
#include "robochar/llm/scripted_backend.hpp"
#include "robochar/llm/structured_call.hpp"
#include "robochar/text.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace robochar;
using namespace robochar::llm;

namespace {

const std::vector<std::string> kMem{"first memory", "second memory"};
const std::vector<std::string> kIn{"Utterance: hello", "Cue: smiles"};

}  // namespace

TEST(Prompt, SectionsAppearInCanonicalOrder) {
    const auto b = assemble_prompt(Stage::Appraise, "Persona text", kMem, kIn);
    ASSERT_EQ(b.sections.size(), 5u);
    EXPECT_EQ(b.sections[0].tag, SectionTag::Persona);
    EXPECT_EQ(b.sections[1].tag, SectionTag::MemoryContext);
    EXPECT_EQ(b.sections[2].tag, SectionTag::HumanInput);
    EXPECT_EQ(b.sections[3].tag, SectionTag::Task);
    EXPECT_EQ(b.sections[4].tag, SectionTag::OutputSchema);
    const auto r = b.render();
    EXPECT_TRUE(r.starts_with("=== STAGE: appraise ===\n### PERSONA\nPersona text\n### MEMORY_CONTEXT\n"
                              "1. first memory\n2. second memory\n### HUMAN_INPUT\nUtterance: hello\n"
                              "Cue: smiles\n### TASK\n"));
    EXPECT_LT(r.find("### TASK"), r.find("### OUTPUT_SCHEMA"));
}

TEST(Prompt, AssemblyIsByteDeterministic) {
    const auto a = assemble_prompt(Stage::SelectAction, "P", kMem, kIn, "Action space (x):\n- speak_only(): d");
    const auto b = assemble_prompt(Stage::SelectAction, "P", kMem, kIn, "Action space (x):\n- speak_only(): d");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.render(), b.render());
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash(), text::digest(a.render()));
    EXPECT_NE(a.section(SectionTag::Task).find("speak_only"), std::string_view::npos);
}

TEST(Prompt, EmptyMemoryUsesSentinel) {
    const auto b = assemble_prompt(Stage::Appraise, "P", {}, kIn);
    EXPECT_EQ(b.section(SectionTag::MemoryContext), "(no memories available)");
    const auto none = assemble_prompt(Stage::Appraise, "P", kMem, {});
    EXPECT_EQ(none.section(SectionTag::HumanInput), "(none)");
}

TEST(Prompt, PersonaRequiredExceptForReflection) {
    EXPECT_THROW(assemble_prompt(Stage::Appraise, "  ", {}, kIn), PreconditionError);
    EXPECT_EQ(assemble_prompt(Stage::Reflect, "", {}, kIn).section(SectionTag::Persona), "(none)");
}

TEST(Prompt, DifferentInputsGiveDifferentHashes) {
    const auto a = assemble_prompt(Stage::Appraise, "P", kMem, kIn);
    const auto b = assemble_prompt(Stage::Appraise, "P", kMem, std::vector<std::string>{"Utterance: bye"});
    const auto c = assemble_prompt(Stage::SelectAction, "P", kMem, kIn);
    EXPECT_NE(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
}

TEST(Prompt, CorrectionOnlyTouchesTask) {
    const auto a = assemble_prompt(Stage::Appraise, "P", kMem, kIn);
    const auto b = with_correction(a, "missing key 'impact'");
    for (std::size_t i = 0; i < a.sections.size(); ++i) {
        if (a.sections[i].tag == SectionTag::Task) {
            EXPECT_NE(b.sections[i].text.find("missing key 'impact'"), std::string::npos);
        } else {
            EXPECT_EQ(a.sections[i], b.sections[i]);
        }
    }
}

TEST(Prompt, StageNamesRoundTrip) {
    for (auto s : {Stage::DescribePersona, Stage::Appraise, Stage::SelectAction, Stage::Reflect}) {
        EXPECT_EQ(stage_from_name(stage_name(s)), s);
    }
    EXPECT_FALSE(stage_from_name("dream").has_value());
}

TEST(Payload, WellFormedAppraisalParsesToIdenticalFields) {
    const auto a = parse_appraisal(
        R"({"relevance": 0.4, "valence": -0.25, "impact": 0.75, "inferred_intent": "tired", "rationale": "r", "extra": 1})");
    EXPECT_DOUBLE_EQ(a.relevance, 0.4);
    EXPECT_DOUBLE_EQ(a.valence, -0.25);
    EXPECT_DOUBLE_EQ(a.impact, 0.75);
    EXPECT_EQ(a.inferred_intent, "tired");
    EXPECT_EQ(a.rationale, "r");
}

TEST(Payload, ToleratesProseAndFences) {
    const auto a = parse_appraisal("Sure!\n```json\n{\"relevance\":1,\"valence\":0,\"impact\":0,\"inferred_intent\":\"x\"}\n```");
    EXPECT_DOUBLE_EQ(a.relevance, 1.0);
    EXPECT_EQ(a.rationale, "");
}

TEST(Payload, OutOfBoundValenceNamesTheBound) {
    try {
        parse_appraisal(R"({"relevance": 0.4, "valence": 3.0, "impact": 0.5, "inferred_intent": "x"})");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("valence"), std::string::npos);
        EXPECT_NE(what.find("[-1, 1]"), std::string::npos);
    }
}

TEST(Payload, MissingImpactNamesTheKey) {
    try {
        parse_payload(Stage::Appraise, R"({"relevance": 0.4, "valence": 0.1, "inferred_intent": "x"})");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("'impact'"), std::string::npos);
    }
}

TEST(Payload, RejectsMalformedDocuments) {
    EXPECT_THROW(parse_payload(Stage::Appraise, "no json here"), ParseError);
    EXPECT_THROW(parse_payload(Stage::Appraise, "{not: json}"), ParseError);
    EXPECT_THROW(parse_payload(Stage::SelectAction, R"({"action_id":"a","bindings":[],"utterance":"u"})"), ParseError);
    EXPECT_THROW(parse_payload(Stage::SelectAction, R"({"action_id":"a","bindings":{"o":1},"utterance":"u"})"), ParseError);
    EXPECT_THROW(parse_payload(Stage::Reflect, R"({"insights":[{"statement":"s","supporting":[],"confidence":0.5}]})"), ParseError);
    EXPECT_THROW(parse_payload(Stage::Reflect, R"({"insights":[{"statement":"s","supporting":[1],"confidence":1.5}]})"), ParseError);
    EXPECT_THROW(parse_payload(Stage::Reflect, R"({"insights":[{"statement":"","supporting":[1],"confidence":0.5}]})"), ParseError);
    EXPECT_THROW(parse_payload(Stage::DescribePersona, R"({"openness":"Huge"})"), ParseError);
}

TEST(Payload, SerializeThenParseIsIdentityOnRandomPayloads) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> small(1, 9);
    for (int i = 0; i < 300; ++i) {
        TraitLevels levels;
        for (auto t : kAllTraits) levels.set(t, kAllTraitLevels[rng() % 5]);
        AppraisalRecord a{unit(rng), unit(rng) * 2.0 - 1.0, unit(rng), "intent " + std::to_string(i), "why"};
        ActionSelection s{"pick_place", {{"object", "plate"}, {"x", std::to_string(i)}}, "hi \"there\"", "r"};
        ReflectionPayload r;
        for (int k = small(rng); k > 0; --k) r.insights.push_back({"s" + std::to_string(k), {k, k + 1}, unit(rng)});

        EXPECT_EQ(std::get<TraitLevels>(parse_payload(Stage::DescribePersona, serialize_payload(levels))), levels);
        EXPECT_EQ(std::get<AppraisalRecord>(parse_payload(Stage::Appraise, serialize_payload(a))), a);
        EXPECT_EQ(std::get<ActionSelection>(parse_payload(Stage::SelectAction, serialize_payload(s))), s);
        EXPECT_EQ(std::get<ReflectionPayload>(parse_payload(Stage::Reflect, serialize_payload(r))), r);
    }
}

TEST(Lexicon, ShippedExamples) {
    EXPECT_DOUBLE_EQ(lexicon_valence(""), 0.0);
    EXPECT_DOUBLE_EQ(lexicon_valence("excited"), 0.7);
    EXPECT_NEAR(lexicon_valence("excited frustration"), 0.05, 1e-12);
    EXPECT_DOUBLE_EQ(lexicon_valence("looks concerned"), -0.4);
    EXPECT_DOUBLE_EQ(lexicon_valence("That went so well."), 0.5);
}

TEST(Lexicon, LongestPhraseWinsWithoutOverlap) {
    // "dry and flat" is one -0.6 phrase, not three words.
    const auto s = Lexicon::shipped().score("dry and flat voice");
    EXPECT_EQ(s.matches, 1);
    EXPECT_DOUBLE_EQ(s.sum, -0.6);
    // too much (-0.4) and hard time (-0.5)
    EXPECT_NEAR(lexicon_valence("It's just too much to review for the fluids final. Why is Mike giving us such a hard time?"),
                -0.45, 1e-12);
}

TEST(Lexicon, CustomTable) {
    const Lexicon lex({{"good", 0.5}, {"not good", -0.5}, {"bad", -1.0}}, "t");
    EXPECT_DOUBLE_EQ(lex.valence("not good"), -0.5);
    EXPECT_DOUBLE_EQ(lex.valence("GOOD good bad"), 0.0);
    EXPECT_EQ(lex.version(), "t");
    EXPECT_THROW(Lexicon({{"x", 1.5}}), ParseError);
    EXPECT_THROW(Lexicon({{"...", 0.5}}), ParseError);
    EXPECT_THROW(Lexicon::from_json(R"({"entries": {"a": "b"}})"), ParseError);
}

TEST(Lexicon, ValenceStaysInRange) {
    std::mt19937_64 rng(3);
    const std::vector<std::string> vocab{"excited", "frustration", "dry", "and", "flat", "well", "hate",
                                         "love", "the", "too", "much", "hard", "time", "worst"};
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        for (int k = static_cast<int>(rng() % 12); k > 0; --k) s += vocab[rng() % vocab.size()] + " ";
        const double v = lexicon_valence(s);
        ASSERT_GE(v, -1.0);
        ASSERT_LE(v, 1.0);
    }
}

TEST(StructuredCall, RetriesWithCorrectionThenSucceeds) {
    BackendConfig cfg;
    cfg.retry_budget = 2;
    ScriptedBackend backend(std::vector<std::string>{"garbage", R"({"relevance":0.5,"valence":0,"impact":0})",
                                                     R"({"relevance":0.5,"valence":0,"impact":0,"inferred_intent":"ok"})"},
                            cfg);
    StageRecord trace;
    const auto bundle = assemble_prompt(Stage::Appraise, "P", {}, kIn);
    const auto a = call_with_retries(backend, bundle, [](const std::string& raw) { return parse_appraisal(raw); }, &trace);
    EXPECT_EQ(a.inferred_intent, "ok");
    EXPECT_EQ(trace.attempts, 3);
    EXPECT_EQ(backend.calls(), 3u);
    const auto seen = backend.received();
    EXPECT_EQ(seen[0], bundle);
    EXPECT_NE(seen[2].section(SectionTag::Task).find("'inferred_intent'"), std::string_view::npos);
    EXPECT_EQ(trace.prompt_hash, seen[2].hash());
    EXPECT_EQ(trace.response_hash, text::digest(trace.response));
}

TEST(StructuredCall, ExhaustionRethrowsAfterBudgetPlusOne) {
    for (int budget = 0; budget <= 4; ++budget) {
        BackendConfig cfg;
        cfg.retry_budget = budget;
        ScriptedBackend backend(std::vector<std::string>{"nope"}, cfg);
        const auto bundle = assemble_prompt(Stage::Appraise, "P", {}, kIn);
        EXPECT_THROW(call_with_retries(backend, bundle, [](const std::string& r) { return parse_appraisal(r); }, nullptr),
                     ParseError);
        EXPECT_EQ(backend.calls(), static_cast<std::size_t>(budget + 1));
    }
}

TEST(StructuredCall, BackendErrorIsNotRetried) {
    ScriptedBackend backend(ScriptedBackend::Responder([](const PromptBundle&, std::size_t) -> std::string {
        throw BackendError(BackendFailure::Exhausted, "down");
    }));
    const auto bundle = assemble_prompt(Stage::Appraise, "P", {}, kIn);
    EXPECT_THROW(call_with_retries(backend, bundle, [](const std::string& r) { return parse_appraisal(r); }, nullptr),
                 BackendError);
    EXPECT_EQ(backend.calls(), 1u);
}

TEST(BackendConfig, ValidationRejectsBadSettings) {
    BackendConfig c;
    EXPECT_NO_THROW(c.validate());
    c.temperature = -0.1;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.retry_budget = -1;
    EXPECT_THROW(c.validate(), ValidationError);
    c = {};
    c.model = "";
    EXPECT_NO_THROW(c.validate());
    c.kind = BackendKind::Http;
    EXPECT_THROW(c.validate(), ValidationError);
}
