#include "robochar/persona.hpp"

#include "robochar/errors.hpp"
#include "robochar/llm/payload.hpp"
#include "robochar/llm/structured_call.hpp"
#include "robochar/text.hpp"

#include <limits>
#include <random>
#include <sstream>

namespace robochar {

namespace {

std::string squash(std::string_view s) {
    std::string out;
    for (char c : text::normalize(s)) {
        if (c != ' ' && c != '-' && c != '_') out.push_back(c);
    }
    return out;
}

std::string escape_descriptor(std::string_view d) {
    std::string out;
    for (char c : d) {
        if (c == '\\' || c == ',') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::optional<TraitLevel> level_from_numeric(double value) {
    for (auto level : kAllTraitLevels) {
        if (numeric(level) == value) return level;
    }
    return std::nullopt;
}

std::string_view level_name(TraitLevel level) {
    switch (level) {
        case TraitLevel::Low: return "Low";
        case TraitLevel::MediumLow: return "Medium-low";
        case TraitLevel::Medium: return "Medium";
        case TraitLevel::MediumHigh: return "Medium-high";
        case TraitLevel::High: return "High";
    }
    return "Medium";
}

std::optional<TraitLevel> parse_level(std::string_view text) {
    const std::string key = squash(text);
    for (auto level : kAllTraitLevels) {
        if (squash(level_name(level)) == key) return level;
    }
    // "low-medium" style ordering shows up in free text.
    if (key == "lowmedium") return TraitLevel::MediumLow;
    if (key == "highmedium") return TraitLevel::MediumHigh;
    return std::nullopt;
}

std::string_view trait_name(Trait trait) {
    switch (trait) {
        case Trait::Openness: return "Openness";
        case Trait::Conscientiousness: return "Conscientiousness";
        case Trait::Extraversion: return "Extraversion";
        case Trait::Agreeableness: return "Agreeableness";
        case Trait::Neuroticism: return "Neuroticism";
    }
    return "Openness";
}

std::string_view trait_key(Trait trait) {
    switch (trait) {
        case Trait::Openness: return "openness";
        case Trait::Conscientiousness: return "conscientiousness";
        case Trait::Extraversion: return "extraversion";
        case Trait::Agreeableness: return "agreeableness";
        case Trait::Neuroticism: return "neuroticism";
    }
    return "openness";
}

std::optional<Trait> parse_trait(std::string_view text) {
    const std::string key = squash(text);
    for (auto t : kAllTraits) {
        if (key == trait_key(t)) return t;
    }
    return std::nullopt;
}

std::string_view provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Parametric: return "parametric";
        case Provenance::Descriptive: return "descriptive";
        case Provenance::Random: return "random";
    }
    return "parametric";
}

std::optional<Provenance> parse_provenance(std::string_view text) {
    for (auto p : {Provenance::Parametric, Provenance::Descriptive, Provenance::Random}) {
        if (text::normalize(text) == provenance_name(p)) return p;
    }
    return std::nullopt;
}

TraitLevel TraitLevels::get(Trait t) const {
    switch (t) {
        case Trait::Openness: return openness;
        case Trait::Conscientiousness: return conscientiousness;
        case Trait::Extraversion: return extraversion;
        case Trait::Agreeableness: return agreeableness;
        case Trait::Neuroticism: return neuroticism;
    }
    return openness;
}

void TraitLevels::set(Trait t, TraitLevel level) {
    switch (t) {
        case Trait::Openness: openness = level; break;
        case Trait::Conscientiousness: conscientiousness = level; break;
        case Trait::Extraversion: extraversion = level; break;
        case Trait::Agreeableness: agreeableness = level; break;
        case Trait::Neuroticism: neuroticism = level; break;
    }
}

PersonalityProfile::PersonalityProfile(TraitLevels levels, std::vector<std::string> descriptors,
                                       Provenance provenance)
    : levels_(levels), descriptors_(std::move(descriptors)), provenance_(provenance) {
    for (const auto& d : descriptors_) {
        if (d.empty() || text::trim(d) != d) {
            throw PreconditionError("descriptor must be non-empty trimmed text: '" + d + "'");
        }
    }
}

PersonalityProfile from_parameters(const TraitLevels& levels, std::vector<std::string> descriptors) {
    return PersonalityProfile(levels, std::move(descriptors), Provenance::Parametric);
}

PersonalityProfile from_description(std::string_view description, llm::Backend& backend) {
    const std::string trimmed = text::trim(description);
    if (trimmed.empty()) throw PreconditionError("personality description must be non-empty");

    const std::vector<std::string> inputs{"Description: " + trimmed};
    auto bundle = llm::assemble_prompt(llm::Stage::DescribePersona, trimmed, {}, inputs);
    const auto levels = llm::call_with_retries(
        backend, std::move(bundle), [](std::string_view raw) { return llm::parse_persona_levels(raw); },
        nullptr);
    return PersonalityProfile(levels, {trimmed}, Provenance::Descriptive);
}

PersonalityProfile random_profile(std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    // Largest multiple of 5 representable; values at or above it are redrawn.
    constexpr std::uint64_t kLimit = std::numeric_limits<std::uint64_t>::max() -
                                     std::numeric_limits<std::uint64_t>::max() % 5;
    TraitLevels levels;
    for (auto trait : kAllTraits) {
        std::uint64_t draw = engine();
        while (draw >= kLimit) draw = engine();
        levels.set(trait, kAllTraitLevels[draw % 5]);
    }
    return PersonalityProfile(levels, {}, Provenance::Random);
}

std::string render_persona_text(const PersonalityProfile& profile) {
    std::ostringstream out;
    out << "Personality (Big Five):\n";
    for (auto trait : kAllTraits) {
        out << trait_name(trait) << ": " << level_name(profile.level(trait)) << '\n';
    }
    out << "Extra specification:";
    const auto& ds = profile.descriptors();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        out << (i == 0 ? " " : ", ") << escape_descriptor(ds[i]);
    }
    out << '\n';
    return out.str();
}

TraitLevels parse_persona_levels(std::string_view persona_text) {
    TraitLevels levels;
    std::istringstream in{std::string(persona_text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        const auto trait = parse_trait(line.substr(0, colon));
        if (!trait) continue;
        if (const auto level = parse_level(text::trim(line.substr(colon + 1)))) {
            levels.set(*trait, *level);
        }
    }
    return levels;
}

}  // namespace robochar
