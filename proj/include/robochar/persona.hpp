#pragma once

#include "robochar/llm/backend.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robochar {

/// Five-point ordinal scale used for every Big Five dimension.
enum class TraitLevel { Low, MediumLow, Medium, MediumHigh, High };

inline constexpr std::array kAllTraitLevels = {TraitLevel::Low, TraitLevel::MediumLow,
                                               TraitLevel::Medium, TraitLevel::MediumHigh,
                                               TraitLevel::High};

/// Numeric anchor of a level: 0, 0.25, 0.5, 0.75, 1.
constexpr double numeric(TraitLevel level) {
    return static_cast<int>(level) * 0.25;
}

/// Inverse of numeric(); nullopt unless `value` is exactly one of the anchors.
std::optional<TraitLevel> level_from_numeric(double value);

/// Canonical display names: "Low", "Medium-low", "Medium", "Medium-high", "High".
std::string_view level_name(TraitLevel level);

/// Accepts the display names plus spacing/case variants ("medium low", "MediumLow").
std::optional<TraitLevel> parse_level(std::string_view text);

enum class Trait { Openness, Conscientiousness, Extraversion, Agreeableness, Neuroticism };

inline constexpr std::array kAllTraits = {Trait::Openness, Trait::Conscientiousness,
                                          Trait::Extraversion, Trait::Agreeableness,
                                          Trait::Neuroticism};

std::string_view trait_name(Trait trait);         // "Openness"
std::string_view trait_key(Trait trait);          // "openness"
std::optional<Trait> parse_trait(std::string_view text);

enum class Provenance { Parametric, Descriptive, Random };

std::string_view provenance_name(Provenance p);
std::optional<Provenance> parse_provenance(std::string_view text);

/// Trait levels in canonical O, C, E, A, N order.
struct TraitLevels {
    TraitLevel openness = TraitLevel::Medium;
    TraitLevel conscientiousness = TraitLevel::Medium;
    TraitLevel extraversion = TraitLevel::Medium;
    TraitLevel agreeableness = TraitLevel::Medium;
    TraitLevel neuroticism = TraitLevel::Medium;

    TraitLevel get(Trait t) const;
    void set(Trait t, TraitLevel level);

    bool operator==(const TraitLevels&) const = default;
};

/// The robot's fixed character. Immutable once built.
class PersonalityProfile {
public:
    PersonalityProfile() = default;
    /// Throws PreconditionError when a descriptor is blank after trimming.
    PersonalityProfile(TraitLevels levels, std::vector<std::string> descriptors,
                       Provenance provenance);

    const TraitLevels& levels() const noexcept { return levels_; }
    TraitLevel level(Trait t) const { return levels_.get(t); }
    double value(Trait t) const { return numeric(levels_.get(t)); }
    const std::vector<std::string>& descriptors() const noexcept { return descriptors_; }
    Provenance provenance() const noexcept { return provenance_; }

    bool operator==(const PersonalityProfile&) const = default;

private:
    TraitLevels levels_;
    std::vector<std::string> descriptors_;
    Provenance provenance_ = Provenance::Parametric;
};

PersonalityProfile from_parameters(const TraitLevels& levels,
                                   std::vector<std::string> descriptors = {});

/// Infers the five levels from free text with one backend call (re-prompted on
/// malformed output up to the backend's retry budget). The text itself is kept
/// as the single descriptor.
PersonalityProfile from_description(std::string_view description, llm::Backend& backend);

/// Each trait drawn independently and uniformly from the five levels using
/// MT19937-64 seeded with `seed` and rejection sampling on the raw 64-bit output.
PersonalityProfile random_profile(std::uint64_t seed);

/// Canonical persona block for prompts. Trait lines in O, C, E, A, N order,
/// then a descriptor line.
std::string render_persona_text(const PersonalityProfile& profile);

/// Reads trait levels back out of a rendered persona block. Lines that do not
/// parse are ignored; missing traits stay Medium.
TraitLevels parse_persona_levels(std::string_view persona_text);

}  // namespace robochar
