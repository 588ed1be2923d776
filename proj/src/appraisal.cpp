#include "robochar/appraisal.hpp"

#include "robochar/llm/lexicon.hpp"
#include "robochar/llm/payload.hpp"
#include "robochar/llm/prompt.hpp"
#include "robochar/text.hpp"

#include <algorithm>
#include <cmath>

namespace robochar {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

std::vector<std::string> render_input_lines(const HumanInput& input, bool with_cues) {
    std::vector<std::string> lines;
    const auto utterance = text::trim(input.utterance);
    if (!utterance.empty()) lines.push_back("Utterance: " + utterance);
    if (with_cues) {
        for (const auto& cue : input.cues) {
            const auto c = text::trim(cue);
            if (!c.empty()) lines.push_back("Cue: " + c);
        }
    }
    return lines;
}

AppraisalRecord appraise(const HumanInput& input, const PersonalityProfile& profile,
                         std::span<const RetrievedMemory> memories, bool emotion_enabled,
                         llm::Backend& backend, llm::StageRecord* trace) {
    input.validate();
    std::vector<std::string> memory_texts;
    memory_texts.reserve(memories.size());
    for (const auto& m : memories) memory_texts.push_back(m.text);
    const auto lines = render_input_lines(input, emotion_enabled);
    const auto bundle = llm::assemble_prompt(llm::Stage::Appraise, render_persona_text(profile), memory_texts,
                                             lines);
    AppraisalRecord record = llm::call_with_retries(backend, bundle, llm::parse_appraisal, trace);
    if (emotion_enabled) return record;

    AppraisalRecord literal;
    literal.relevance = record.relevance;
    literal.valence = std::clamp(llm::lexicon_valence(input.utterance), -1.0, 1.0);
    literal.impact = 0.0;
    literal.inferred_intent = "Literal reading: " + text::trim(input.utterance);
    literal.rationale = "Emotion disabled: cues ignored, valence from the words alone.";
    return literal;
}

EmotionLabel label_for(double valence, double impact, double intensity, const PersonalityProfile& profile) {
    if (intensity <= 0.1) return EmotionLabel::Neutral;
    const auto E = profile.level(Trait::Extraversion);
    const auto A = profile.level(Trait::Agreeableness);
    const auto C = profile.level(Trait::Conscientiousness);
    const auto N = profile.level(Trait::Neuroticism);
    if (valence >= 0.1) {
        if (impact >= 0.6) {
            if (E == TraitLevel::High) return EmotionLabel::Amusement;
            if (A == TraitLevel::High) return EmotionLabel::Joy;
            if (N >= TraitLevel::MediumHigh) return EmotionLabel::Relief;
            return EmotionLabel::Satisfaction;
        }
        return C >= TraitLevel::MediumHigh ? EmotionLabel::Satisfaction : EmotionLabel::Joy;
    }
    if (valence <= -0.1) {
        if (A == TraitLevel::High) return EmotionLabel::Empathy;
        if (impact >= 0.6 && N >= TraitLevel::MediumHigh) return EmotionLabel::Anxiety;
        if (impact >= 0.6 && A <= TraitLevel::Low) return EmotionLabel::Frustration;
        return EmotionLabel::Concern;
    }
    return EmotionLabel::Surprise;
}

EmotionState derive_emotion(const AppraisalRecord& appraisal, const PersonalityProfile& profile,
                            const EmotionState& /*prior*/, bool emotion_enabled) {
    if (!emotion_enabled) return EmotionState::neutral();
    const double N = profile.value(Trait::Neuroticism);
    const double E = profile.value(Trait::Extraversion);
    const double negative = appraisal.valence < 0.0 ? 1.0 : 0.0;
    EmotionState s;
    s.intensity = clamp01(appraisal.impact * (1.0 + 0.5 * (N - 0.5) * negative));
    s.arousal = clamp01(appraisal.impact * (0.5 + E));
    s.valence = std::clamp(appraisal.valence, -1.0, 1.0);
    s.label = label_for(s.valence, appraisal.impact, s.intensity, profile);
    return s;
}

}  // namespace robochar
