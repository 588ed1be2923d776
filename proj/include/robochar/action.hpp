#pragma once

#include "robochar/action_space.hpp"
#include "robochar/emotion.hpp"
#include "robochar/llm/backend.hpp"
#include "robochar/llm/structured_call.hpp"
#include "robochar/memory.hpp"
#include "robochar/persona.hpp"

#include <span>

namespace robochar {

inline constexpr std::string_view kFallbackUtterance = "I hear you. I'm here if you need anything.";

// Asks the backend for an action from `space`. Replies that fail to parse or
// fail validate_selection are re-prompted up to the retry budget; after that
// the result degrades to speak_only with kFallbackUtterance. The returned
// selection always validates against `space`. BackendError propagates.
ActionSelection select_action(const HumanInput& input, const EmotionState& emotion,
                              const AppraisalRecord& appraisal, const PersonalityProfile& profile,
                              std::span<const RetrievedMemory> memories, const ActionSpace& space,
                              llm::Backend& backend, llm::StageRecord* trace = nullptr);

std::string describe_selection(const ActionSelection& selection);  // "pick_place(object=flower)"

}  // namespace robochar
