#include "robochar/engine.hpp"

#include "robochar/action.hpp"
#include "robochar/errors.hpp"
#include "robochar/llm/lexicon.hpp"
#include "robochar/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <random>

namespace robochar {

namespace {

llm::StageRecord local_stage(std::string name, std::string note) {
    llm::StageRecord r;
    r.stage = std::move(name);
    r.note = std::move(note);
    return r;
}

std::string human_action_text(const HumanInput& input) {
    const auto utterance = text::trim(input.utterance);
    if (!utterance.empty()) return utterance;
    return "(cues) " + text::join(input.cues, ", ");
}

std::string query_text(const HumanInput& input) {
    std::string q = input.utterance;
    for (const auto& cue : input.cues) q += ' ' + cue;
    return q;
}

std::string fresh_session_id() {
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    return fmt::format("s-{:016x}", gen());
}

}  // namespace

SpaceRegistry::SpaceRegistry() {
    add(default_kitchen_space());
}

void SpaceRegistry::add(ActionSpace space) {
    auto id = space.id();
    spaces_.insert_or_assign(std::move(id), std::move(space));
}

const ActionSpace* SpaceRegistry::find(std::string_view id) const {
    const auto it = spaces_.find(id);
    return it == spaces_.end() ? nullptr : &it->second;
}

const SpaceRegistry& SpaceRegistry::builtin() {
    static const SpaceRegistry registry;
    return registry;
}

std::vector<const TurnResult*> Transcript::turns() const {
    std::vector<const TurnResult*> out;
    for (const auto& e : entries) {
        if (e.turn) out.push_back(&*e.turn);
    }
    return out;
}

Session::Session(std::string id, AgentConfig config, ActionSpace space, std::unique_ptr<llm::Backend> backend)
    : id_(std::move(id)),
      config_(std::move(config)),
      space_(std::move(space)),
      backend_(std::move(backend)),
      persona_text_(render_persona_text(config_.profile)) {
    if (!backend_) throw PreconditionError("session needs a backend");
}

TurnResult Session::step(HumanInput input) {
    input.validate();
    if (input.day < clock_.day) {
        throw OrderViolation(fmt::format("turn for day {} arrived on day {}", input.day, clock_.day));
    }
    const bool memory_on = config_.ablation.memory_enabled;
    const bool emotion_on = config_.ablation.emotion_enabled;
    const std::int64_t tick = ticks_ + 1;
    input.timestamp = tick;

    TurnResult result;
    result.input = input;

    if (memory_on) {
        RetrievalQuery q{query_text(input), input.day, tick, config_.retrieval.top_k};
        result.retrieved = retrieve(store_, q, config_.retrieval.decay);
        result.trace.push_back(local_stage("retrieve", fmt::format("{} memories", result.retrieved.size())));
    }

    llm::StageRecord appraise_trace;
    result.appraisal = appraise(input, config_.profile, result.retrieved, emotion_on, *backend_, &appraise_trace);
    result.trace.push_back(std::move(appraise_trace));

    result.emotion = derive_emotion(result.appraisal, config_.profile, emotion_, emotion_on);
    result.trace.push_back(local_stage("emote", fmt::format("{} intensity={}", emotion_name(result.emotion.label),
                                                            text::fixed(result.emotion.intensity))));

    HumanInput seen = input;
    if (!emotion_on) seen.cues.clear();
    llm::StageRecord select_trace;
    result.selection = select_action(seen, result.emotion, result.appraisal, config_.profile, result.retrieved,
                                     space_, *backend_, &select_trace);
    result.trace.push_back(std::move(select_trace));

    MemoryStore next = store_;
    if (input.day > next.current_day()) next.advance_to(input.day);
    if (memory_on) {
        EpisodicRecord ep;
        ep.day = input.day;
        ep.timestamp = tick;
        ep.human_action = human_action_text(input);
        ep.human_valence = result.appraisal.valence;
        ep.robot_emotion = result.emotion;
        ep.robot_response = result.selection;
        ep.observed_reaction = input.observed_reaction;
        ep.reaction_valence = std::clamp(llm::lexicon_valence(input.observed_reaction), -1.0, 1.0);
        result.episode_id = next.log_episode(std::move(ep));
        result.trace.push_back(local_stage("log", *result.episode_id));
    }

    store_ = std::move(next);
    if (input.day > clock_.day) clock_ = Clock{input.day, 0};
    ++clock_.turn;
    ticks_ = tick;
    emotion_ = result.emotion;
    transcript_.push_back(result);
    return result;
}

DayReflection Session::end_day() {
    DayReflection out;
    out.day = clock_.day;
    MemoryStore next = store_;
    if (config_.ablation.memory_enabled) {
        llm::StageRecord trace;
        const bool has_episodes = !next.episodes_of_day(clock_.day).empty();
        out.memories = reflect(next, clock_.day, *backend_, &trace);
        if (has_episodes) out.trace = std::move(trace);
    } else {
        next.close_day(clock_.day);
    }
    store_ = std::move(next);
    clock_ = Clock{out.day + 1, 0};
    return out;
}

void Session::restore(MemoryStore store, EmotionState emotion, Clock clock, std::int64_t ticks) {
    if (store.current_day() != clock.day) {
        throw PreconditionError(fmt::format("store day {} does not match clock day {}", store.current_day(),
                                            clock.day));
    }
    if (clock.day < 1 || clock.turn < 0 || ticks < 0) throw PreconditionError("clock out of range");
    if (ticks < store.last_timestamp()) throw PreconditionError("tick counter is behind the store");
    if (!emotion.valid()) throw PreconditionError("restored emotion state is invalid");
    store_ = std::move(store);
    emotion_ = emotion;
    clock_ = clock;
    ticks_ = ticks;
}

namespace {

const ActionSpace& checked_space(const AgentConfig& config, const SpaceRegistry& spaces) {
    if (config.retrieval.top_k < 1) throw ValidationError("retrieval.top_k", "must be >= 1");
    if (!(config.retrieval.decay.lambda_per_day >= 0.0)) {
        throw ValidationError("retrieval.lambda_per_day", "must be >= 0");
    }
    if (!(config.retrieval.decay.days_per_tick >= 0.0)) {
        throw ValidationError("retrieval.days_per_tick", "must be >= 0");
    }
    config.backend.validate();
    const ActionSpace* space = spaces.find(config.space_id);
    if (!space) throw UnknownSpace("unknown action space '" + config.space_id + "'");
    return *space;
}

}  // namespace

Session new_session(const AgentConfig& config, const SpaceRegistry& spaces, std::string id) {
    const ActionSpace& space = checked_space(config, spaces);
    return Session(id.empty() ? fresh_session_id() : std::move(id), config, space,
                   llm::make_backend(config.backend));
}

Session new_session(const AgentConfig& config, std::unique_ptr<llm::Backend> backend, const SpaceRegistry& spaces,
                    std::string id) {
    const ActionSpace& space = checked_space(config, spaces);
    return Session(id.empty() ? fresh_session_id() : std::move(id), config, space, std::move(backend));
}

Transcript replay(const AgentConfig& config, const std::vector<HumanInput>& inputs, const SpaceRegistry& spaces) {
    Session session = new_session(config, spaces, "replay");
    Transcript transcript;
    for (const auto& input : inputs) {
        if (input.day > session.clock().day) {
            transcript.entries.push_back({std::nullopt, session.end_day()});
        }
        transcript.entries.push_back({session.step(input), std::nullopt});
    }
    if (!inputs.empty()) transcript.entries.push_back({std::nullopt, session.end_day()});
    return transcript;
}

}  // namespace robochar
