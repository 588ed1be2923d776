#pragma once

#include "robochar/emotion.hpp"
#include "robochar/llm/backend.hpp"
#include "robochar/llm/structured_call.hpp"
#include "robochar/memory.hpp"
#include "robochar/persona.hpp"

#include <span>
#include <string>
#include <vector>

namespace robochar {

// Prompt lines for the human_input section. Cue lines are omitted when
// `with_cues` is false.
std::vector<std::string> render_input_lines(const HumanInput& input, bool with_cues);

// Evaluates relevance, valence and impact of a human turn.
//
// With emotion enabled the backend sees utterance, cues and memories and its
// record is returned as parsed; out-of-range numbers count as a failed attempt.
// With emotion disabled the cues are stripped before prompting, only relevance
// is taken from the backend, valence is the lexicon score of the utterance,
// impact is 0 and the intent is the literal reading.
AppraisalRecord appraise(const HumanInput& input, const PersonalityProfile& profile,
                         std::span<const RetrievedMemory> memories, bool emotion_enabled,
                         llm::Backend& backend, llm::StageRecord* trace = nullptr);

// Rule-based emotion from an appraisal and the personality.
//
//   intensity = clamp01(impact * (1 + 0.5 * (N - 0.5) * [valence < 0]))
//   arousal   = clamp01(impact * (0.5 + E))
//   valence   = appraisal valence
//
// The label comes from a fixed table over valence sign, impact band and
// traits; see label_for(). Disabled emotion yields EmotionState::neutral().
// `prior` is accepted for mood continuity and currently unused.
EmotionState derive_emotion(const AppraisalRecord& appraisal, const PersonalityProfile& profile,
                            const EmotionState& prior, bool emotion_enabled);

EmotionLabel label_for(double valence, double impact, double intensity,
                       const PersonalityProfile& profile);

}  // namespace robochar
