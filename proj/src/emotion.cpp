#include "robochar/emotion.hpp"

#include "robochar/errors.hpp"
#include "robochar/text.hpp"

namespace robochar {

std::string_view emotion_name(EmotionLabel label) {
    switch (label) {
        case EmotionLabel::Joy: return "joy";
        case EmotionLabel::Amusement: return "amusement";
        case EmotionLabel::Empathy: return "empathy";
        case EmotionLabel::Concern: return "concern";
        case EmotionLabel::Satisfaction: return "satisfaction";
        case EmotionLabel::Relief: return "relief";
        case EmotionLabel::Surprise: return "surprise";
        case EmotionLabel::Frustration: return "frustration";
        case EmotionLabel::Anxiety: return "anxiety";
        case EmotionLabel::Neutral: return "neutral";
    }
    return "neutral";
}

std::optional<EmotionLabel> parse_emotion(std::string_view name) {
    const std::string key = text::normalize(text::trim(name));
    for (auto label : kAllEmotionLabels) {
        if (emotion_name(label) == key) return label;
    }
    return std::nullopt;
}

int sign_class(EmotionLabel label) {
    switch (label) {
        case EmotionLabel::Joy:
        case EmotionLabel::Amusement:
        case EmotionLabel::Satisfaction:
        case EmotionLabel::Relief:
            return 1;
        case EmotionLabel::Concern:
        case EmotionLabel::Frustration:
        case EmotionLabel::Anxiety:
            return -1;
        // Empathy responds to someone else's distress, so its valence follows
        // the appraisal in either direction.
        case EmotionLabel::Empathy:
        case EmotionLabel::Surprise:
        case EmotionLabel::Neutral:
            return 0;
    }
    return 0;
}

bool EmotionState::valid() const {
    if (!(intensity >= 0.0 && intensity <= 1.0)) return false;
    if (!(valence >= -1.0 && valence <= 1.0)) return false;
    if (!(arousal >= 0.0 && arousal <= 1.0)) return false;
    if (label == EmotionLabel::Neutral && intensity > 0.1) return false;
    const int cls = sign_class(label);
    if (cls > 0 && valence < 0.0) return false;
    if (cls < 0 && valence > 0.0) return false;
    return true;
}

bool AppraisalRecord::valid() const {
    return relevance >= 0.0 && relevance <= 1.0 && valence >= -1.0 && valence <= 1.0 &&
           impact >= 0.0 && impact <= 1.0;
}

void HumanInput::validate() const {
    if (text::trim(utterance).empty() && cues.empty()) {
        throw PreconditionError("human input needs an utterance or at least one cue");
    }
    if (day < 1) throw PreconditionError("human input day must be >= 1");
}

}  // namespace robochar
