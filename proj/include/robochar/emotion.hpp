#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robochar {

enum class EmotionLabel {
    Joy,
    Amusement,
    Empathy,
    Concern,
    Satisfaction,
    Relief,
    Surprise,
    Frustration,
    Anxiety,
    Neutral
};

inline constexpr std::array kAllEmotionLabels = {
    EmotionLabel::Joy,         EmotionLabel::Amusement, EmotionLabel::Empathy,
    EmotionLabel::Concern,     EmotionLabel::Satisfaction, EmotionLabel::Relief,
    EmotionLabel::Surprise,    EmotionLabel::Frustration, EmotionLabel::Anxiety,
    EmotionLabel::Neutral};

std::string_view emotion_name(EmotionLabel label);
std::optional<EmotionLabel> parse_emotion(std::string_view text);

// +1: valence must be >= 0, -1: valence must be <= 0, 0: unconstrained.
int sign_class(EmotionLabel label);

struct EmotionState {
    EmotionLabel label = EmotionLabel::Neutral;
    double intensity = 0.0;
    double valence = 0.0;
    double arousal = 0.0;

    static EmotionState neutral() { return {}; }
    // Bounds, neutral-intensity cap and label sign class.
    bool valid() const;

    bool operator==(const EmotionState&) const = default;
};

struct AppraisalRecord {
    double relevance = 0.0;  // [0,1]
    double valence = 0.0;    // [-1,1]
    double impact = 0.0;     // [0,1]
    std::string inferred_intent;
    std::string rationale;

    bool valid() const;

    bool operator==(const AppraisalRecord&) const = default;
};

// One human turn as perceived by the robot. Cues are the textual stand-in for
// facial expression, gesture and tone.
struct HumanInput {
    std::string utterance;
    std::vector<std::string> cues;
    int day = 1;
    // Assigned by the session; callers may leave it at 0.
    std::int64_t timestamp = 0;
    // The human's observable response to the robot's action in this turn,
    // when known (scripted replays, UI follow-up). Feeds the episode's
    // observed_reaction and reaction_valence.
    std::string observed_reaction;

    // Throws PreconditionError when both utterance and cues are empty.
    void validate() const;

    bool operator==(const HumanInput&) const = default;
};

}  // namespace robochar
