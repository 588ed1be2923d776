#include "robochar/errors.hpp"
#include "robochar/llm/mock_backend.hpp"
#include "robochar/llm/scripted_backend.hpp"
#include "robochar/persona.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <array>
#include <random>
#include <set>

using namespace robochar;
using robochar::fixtures::levels;
using L = TraitLevel;

TEST(Persona, LevelNumericMappingIsBijective) {
    const std::array<double, 5> anchors{0.0, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t i = 0; i < kAllTraitLevels.size(); ++i) {
        EXPECT_DOUBLE_EQ(numeric(kAllTraitLevels[i]), anchors[i]);
        EXPECT_EQ(level_from_numeric(anchors[i]), kAllTraitLevels[i]);
        EXPECT_EQ(parse_level(level_name(kAllTraitLevels[i])), kAllTraitLevels[i]);
    }
    EXPECT_FALSE(level_from_numeric(0.3).has_value());
    EXPECT_FALSE(level_from_numeric(-0.25).has_value());
}

TEST(Persona, ParseLevelAcceptsSpellingVariants) {
    EXPECT_EQ(parse_level("Medium-low"), L::MediumLow);
    EXPECT_EQ(parse_level("medium low"), L::MediumLow);
    EXPECT_EQ(parse_level("MediumHigh"), L::MediumHigh);
    EXPECT_EQ(parse_level(" HIGH "), L::High);
    EXPECT_FALSE(parse_level("Huge").has_value());
    EXPECT_FALSE(parse_level("").has_value());
}

TEST(Persona, FromParametersCopiesFieldsVerbatim) {
    const auto l = levels(L::Low, L::High, L::MediumLow, L::MediumHigh, L::MediumLow);
    const auto p = from_parameters(l, {"Calm", "Structured", "Efficient"});
    EXPECT_EQ(p.levels(), l);
    EXPECT_EQ(p.descriptors(), (std::vector<std::string>{"Calm", "Structured", "Efficient"}));
    EXPECT_EQ(p.provenance(), Provenance::Parametric);
}

TEST(Persona, FromParametersRoundTripsEveryLevelCombination) {
    for (auto o : kAllTraitLevels)
        for (auto c : kAllTraitLevels)
            for (auto e : kAllTraitLevels)
                for (auto a : kAllTraitLevels)
                    for (auto n : kAllTraitLevels) {
                        const auto l = levels(o, c, e, a, n);
                        ASSERT_EQ(from_parameters(l).levels(), l);
                    }
}

TEST(Persona, AllMediumHasHalfEverywhere) {
    const auto p = from_parameters(TraitLevels{});
    for (auto t : kAllTraits) EXPECT_DOUBLE_EQ(p.value(t), 0.5);
    EXPECT_TRUE(p.descriptors().empty());
}

TEST(Persona, DescriptorsMustBeTrimmedAndNonEmpty) {
    EXPECT_THROW(from_parameters(TraitLevels{}, {""}), PreconditionError);
    EXPECT_THROW(from_parameters(TraitLevels{}, {" Calm"}), PreconditionError);
}

TEST(Persona, RandomProfileIsPureFunctionOfSeed) {
    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL, 0xdeadbeefULL}) {
        EXPECT_EQ(random_profile(seed), random_profile(seed));
        EXPECT_EQ(random_profile(seed).provenance(), Provenance::Random);
    }
}

TEST(Persona, RandomProfileMatchesIndependentDraws) {
    // Oracle: MT19937-64 output, reject values >= 2^64 - (2^64 mod 5), take mod 5.
    const unsigned __int128 range = static_cast<unsigned __int128>(1) << 64;
    const auto limit = static_cast<std::uint64_t>(range - range % 5);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        std::mt19937_64 gen(seed);
        const auto p = random_profile(seed);
        for (auto t : kAllTraits) {
            std::uint64_t x = gen();
            while (x >= limit) x = gen();
            ASSERT_EQ(static_cast<int>(p.level(t)), static_cast<int>(x % 5)) << "seed " << seed;
        }
    }
}

TEST(Persona, RandomProfileFrequenciesAreUniform) {
    std::array<std::array<int, 5>, 5> counts{};
    constexpr int kSeeds = 10000;
    for (int s = 0; s < kSeeds; ++s) {
        const auto p = random_profile(static_cast<std::uint64_t>(s));
        for (std::size_t t = 0; t < kAllTraits.size(); ++t) ++counts[t][static_cast<int>(p.level(kAllTraits[t]))];
    }
    for (const auto& per_trait : counts) {
        for (int c : per_trait) {
            const double f = static_cast<double>(c) / kSeeds;
            EXPECT_NEAR(f, 0.2, 0.02);
        }
    }
}

TEST(Persona, RenderIsCanonical) {
    const auto text = render_persona_text(fixtures::adam());
    const auto o = text.find("Openness: Low");
    const auto c = text.find("Conscientiousness: High");
    ASSERT_NE(o, std::string::npos);
    ASSERT_NE(c, std::string::npos);
    EXPECT_LT(o, c);
    EXPECT_EQ(text,
              "Personality (Big Five):\n"
              "Openness: Low\n"
              "Conscientiousness: High\n"
              "Extraversion: Medium-low\n"
              "Agreeableness: Medium-high\n"
              "Neuroticism: Medium-low\n"
              "Extra specification: Calm, Structured, Efficient\n");
    EXPECT_EQ(text, render_persona_text(fixtures::adam()));
    EXPECT_NE(render_persona_text(fixtures::bella()).find("Empathetic, Thoughtful, Warm"), std::string::npos);
}

TEST(Persona, RenderRoundTripsLevels) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto p = random_profile(seed);
        EXPECT_EQ(parse_persona_levels(render_persona_text(p)), p.levels());
    }
}

TEST(Persona, RenderIsInjective) {
    // Descriptor lists that would collide under naive comma joining.
    const std::vector<std::vector<std::string>> lists{
        {}, {"a"}, {"a, b"}, {"a", "b"}, {"a,", "b"}, {"a\\", "b"}, {"a\\, b"}, {"b", "a"}};
    std::set<std::pair<std::string, std::vector<std::string>>> inputs;
    std::set<std::string> renders;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto p0 = random_profile(seed);
        for (const auto& d : lists) {
            const auto p = from_parameters(p0.levels(), d);
            inputs.insert({render_persona_text(p0), d});
            renders.insert(render_persona_text(p));
        }
    }
    EXPECT_EQ(renders.size(), inputs.size());
}

TEST(Persona, FromDescriptionUsesKeywordRules) {
    llm::MockBackend backend(llm::BackendConfig{});
    const std::string text = "A curious and outgoing companion willing to explore and engage in interactions.";
    const auto p = from_description(text, backend);
    EXPECT_EQ(p.provenance(), Provenance::Descriptive);
    EXPECT_EQ(p.level(Trait::Openness), L::High);
    EXPECT_EQ(p.level(Trait::Extraversion), L::High);
    EXPECT_EQ(p.level(Trait::Conscientiousness), L::Medium);
    EXPECT_EQ(p.level(Trait::Agreeableness), L::Medium);
    EXPECT_EQ(p.level(Trait::Neuroticism), L::Medium);
    EXPECT_EQ(p.descriptors(), std::vector<std::string>{text});
    EXPECT_EQ(backend.calls(), 1u);
    EXPECT_EQ(from_description(text, backend), p);
}

TEST(Persona, FromDescriptionRejectsEmptyText) {
    llm::MockBackend backend(llm::BackendConfig{});
    EXPECT_THROW(from_description("", backend), PreconditionError);
    EXPECT_THROW(from_description("   ", backend), PreconditionError);
    EXPECT_EQ(backend.calls(), 0u);
}

TEST(Persona, FromDescriptionRetriesThenFails) {
    llm::BackendConfig cfg;
    cfg.retry_budget = 2;
    llm::ScriptedBackend bad(std::vector<std::string>{R"({"openness": "Huge"})"}, cfg);
    EXPECT_THROW(from_description("Shy robot", bad), ParseError);
    EXPECT_EQ(bad.calls(), 3u);

    llm::ScriptedBackend recovers(
        std::vector<std::string>{"not json",
                                 R"({"openness":"Low","conscientiousness":"High","extraversion":"Low",)"
                                 R"("agreeableness":"High","neuroticism":"Low"})"},
        cfg);
    const auto p = from_description("Shy robot", recovers);
    EXPECT_EQ(p.level(Trait::Conscientiousness), L::High);
    EXPECT_EQ(recovers.calls(), 2u);
    const auto prompts = recovers.received();
    ASSERT_EQ(prompts.size(), 2u);
    EXPECT_NE(prompts[1].section(llm::SectionTag::Task).find("rejected"), std::string_view::npos);
}
