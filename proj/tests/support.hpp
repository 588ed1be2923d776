#pragma once

#include "robochar/engine.hpp"
#include "robochar/scenario.hpp"
#include "robochar/serialize.hpp"

#include <filesystem>
#include <string>

namespace robochar::fixtures {

inline std::filesystem::path data_path(const std::string& rel) {
    return std::filesystem::path(ROBOCHAR_SOURCE_DATA_DIR) / rel;
}

inline AgentConfig config(const std::string& name) {
    return load_config(data_path("configs/" + name + ".json"));
}

inline Script ella() {
    return load_script(data_path("scripts/ella_arc.json"));
}

inline TraitLevels levels(TraitLevel o, TraitLevel c, TraitLevel e, TraitLevel a, TraitLevel n) {
    TraitLevels l;
    l.openness = o;
    l.conscientiousness = c;
    l.extraversion = e;
    l.agreeableness = a;
    l.neuroticism = n;
    return l;
}

inline PersonalityProfile adam() {
    using L = TraitLevel;
    return from_parameters(levels(L::Low, L::High, L::MediumLow, L::MediumHigh, L::MediumLow),
                           {"Calm", "Structured", "Efficient"});
}

inline PersonalityProfile bella() {
    using L = TraitLevel;
    return from_parameters(levels(L::Medium, L::MediumHigh, L::Medium, L::High, L::MediumHigh),
                           {"Empathetic", "Thoughtful", "Warm"});
}

inline PersonalityProfile caleb() {
    using L = TraitLevel;
    return from_parameters(levels(L::High, L::MediumLow, L::High, L::MediumLow, L::MediumLow),
                           {"Mean", "Humorous", "Caring"});
}

inline EpisodicRecord episode(int day, std::int64_t ts, std::string human, double hv = 0.0,
                              std::string action = "speak_only", double rv = 0.0) {
    EpisodicRecord r;
    r.day = day;
    r.timestamp = ts;
    r.human_action = std::move(human);
    r.human_valence = hv;
    r.robot_response.action_id = std::move(action);
    if (r.robot_response.action_id == "perform_motion") r.robot_response.bindings["motion"] = "dance";
    if (r.robot_response.action_id == "pick_place") r.robot_response.bindings["object"] = "plate";
    r.reaction_valence = rv;
    return r;
}

}  // namespace robochar::fixtures
