#include "robochar/memory.hpp"

#include "robochar/action.hpp"
#include "robochar/errors.hpp"
#include "robochar/llm/payload.hpp"
#include "robochar/llm/prompt.hpp"
#include "robochar/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace robochar {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }
bool in_signed_unit(double x) { return x >= -1.0 && x <= 1.0; }

std::string quoted(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '"', '\'');
    std::replace(out.begin(), out.end(), '\n', ' ');
    return out;
}

}  // namespace

std::int64_t MemoryStore::last_timestamp() const noexcept {
    return episodic_.empty() ? 0 : episodic_.back().timestamp;
}

bool MemoryStore::id_taken(std::string_view id) const {
    return std::any_of(episodic_.begin(), episodic_.end(), [&](const auto& e) { return e.id == id; }) ||
           std::any_of(semantic_.begin(), semantic_.end(), [&](const auto& s) { return s.id == id; });
}

std::string MemoryStore::log_episode(EpisodicRecord record) {
    if (record.day != current_day_) {
        throw PreconditionError(fmt::format("episode day {} is not the current day {}", record.day, current_day_));
    }
    if (!episodic_.empty() && record.timestamp <= last_timestamp()) {
        throw OrderViolation(fmt::format("episode timestamp {} does not follow {}", record.timestamp,
                                         last_timestamp()));
    }
    if (!in_signed_unit(record.human_valence)) throw PreconditionError("human_valence out of [-1, 1]");
    if (!in_signed_unit(record.reaction_valence)) throw PreconditionError("reaction_valence out of [-1, 1]");
    if (!record.robot_emotion.valid()) throw PreconditionError("robot_emotion is not a valid emotion state");
    record.importance = score_importance(record);
    if (record.id.empty()) {
        record.id = fmt::format("ep-{:04}", episodic_.size() + 1);
    } else if (id_taken(record.id)) {
        throw PreconditionError("duplicate memory id '" + record.id + "'");
    }
    episodic_.push_back(std::move(record));
    return episodic_.back().id;
}

std::string MemoryStore::add_semantic(SemanticMemory memory) {
    if (text::trim(memory.statement).empty()) throw PreconditionError("semantic statement is empty");
    if (memory.supporting_episodes.empty()) throw PreconditionError("semantic memory needs supporting episodes");
    if (!in_unit(memory.confidence)) throw PreconditionError("confidence out of [0, 1]");
    if (memory.created_day > current_day_) {
        throw PreconditionError(fmt::format("semantic day {} is after the current day {}", memory.created_day,
                                            current_day_));
    }
    for (const auto& id : memory.supporting_episodes) {
        const EpisodicRecord* ep = find_episode(id);
        if (!ep) throw PreconditionError("supporting episode '" + id + "' does not exist");
        if (ep->day > memory.created_day) {
            throw PreconditionError("semantic memory predates supporting episode '" + id + "'");
        }
    }
    if (memory.id.empty()) {
        memory.id = fmt::format("sm-{:04}", semantic_.size() + 1);
    } else if (id_taken(memory.id)) {
        throw PreconditionError("duplicate memory id '" + memory.id + "'");
    }
    semantic_.push_back(std::move(memory));
    return semantic_.back().id;
}

void MemoryStore::close_day(int day) {
    if (day != current_day_) {
        throw OrderViolation(fmt::format("cannot close day {} while on day {}", day, current_day_));
    }
    ++current_day_;
}

void MemoryStore::advance_to(int day) {
    if (day < current_day_) {
        throw OrderViolation(fmt::format("cannot move back from day {} to {}", current_day_, day));
    }
    current_day_ = day;
}

const EpisodicRecord* MemoryStore::find_episode(std::string_view id) const {
    const auto it = std::find_if(episodic_.begin(), episodic_.end(), [&](const auto& e) { return e.id == id; });
    return it == episodic_.end() ? nullptr : &*it;
}

std::vector<EpisodicRecord> MemoryStore::episodes_of_day(int day) const {
    std::vector<EpisodicRecord> out;
    std::copy_if(episodic_.begin(), episodic_.end(), std::back_inserter(out),
                 [&](const auto& e) { return e.day == day; });
    return out;
}

MemoryStore MemoryStore::restore(int current_day, std::vector<EpisodicRecord> episodic,
                                 std::vector<SemanticMemory> semantic) {
    MemoryStore store;
    for (auto& e : episodic) {
        if (e.id.empty()) throw PreconditionError("restored episode has no id");
        if (e.day < store.current_day_) throw OrderViolation("restored episodes are not in day order");
        store.advance_to(e.day);
        const double stated = e.importance;
        const std::string id = store.log_episode(std::move(e));
        if (std::abs(store.episodic_.back().importance - stated) > 1e-9) {
            throw PreconditionError("restored episode '" + id + "' has inconsistent importance");
        }
    }
    store.advance_to(current_day);
    for (auto& s : semantic) {
        if (s.id.empty()) throw PreconditionError("restored semantic memory has no id");
        store.add_semantic(std::move(s));
    }
    return store;
}

double score_importance(const EpisodicRecord& record) {
    const double physical = record.robot_response.action_id == kSpeakOnly ? 0.0 : 0.2;
    return std::min(1.0, (std::abs(record.human_valence) + std::abs(record.reaction_valence)) / 2.0 + physical);
}

double lexical_relevance(std::string_view query, std::string_view memory_text) {
    const auto q = text::content_words(query);
    if (q.empty()) return 0.0;
    const auto m = text::content_words(memory_text);
    const auto shared = std::count_if(q.begin(), q.end(), [&](const std::string& w) { return m.count(w) > 0; });
    return static_cast<double>(shared) / static_cast<double>(q.size());
}

double memory_age_days(int now_day, std::int64_t now, int memory_day, std::int64_t memory_timestamp,
                       const DecaySettings& decay) {
    const double age = static_cast<double>(now_day - memory_day) +
                       decay.days_per_tick * static_cast<double>(now - memory_timestamp);
    return std::max(0.0, age);
}

std::string relevance_text(const EpisodicRecord& record) {
    return record.human_action + ' ' + record.robot_response.utterance + ' ' + record.observed_reaction;
}

std::string render_episode_line(const EpisodicRecord& r) {
    return fmt::format("day={} t={} human=\"{}\" human_valence={} emotion={} action={} said=\"{}\" "
                       "reaction=\"{}\" reaction_valence={}",
                       r.day, r.timestamp, quoted(r.human_action), text::fixed(r.human_valence),
                       emotion_name(r.robot_emotion.label), describe_selection(r.robot_response),
                       quoted(r.robot_response.utterance), quoted(r.observed_reaction),
                       text::fixed(r.reaction_valence));
}

std::vector<RetrievedMemory> retrieve(const MemoryStore& store, const RetrievalQuery& query,
                                      const DecaySettings& decay) {
    if (query.top_k < 1) throw PreconditionError("top_k must be >= 1");
    std::vector<RetrievedMemory> pool;
    pool.reserve(store.episodic().size() + store.semantic().size());
    auto finish = [&](RetrievedMemory m) {
        const double age = memory_age_days(query.day, query.now, m.day, m.timestamp, decay);
        m.recency = std::exp(-decay.lambda_per_day * age);
        m.score = (m.recency + m.importance + m.relevance) / 3.0;
        pool.push_back(std::move(m));
    };
    for (const auto& e : store.episodic()) {
        RetrievedMemory m;
        m.kind = MemoryKind::Episodic;
        m.id = e.id;
        m.text = render_episode_line(e);
        m.day = e.day;
        m.timestamp = e.timestamp;
        m.importance = e.importance;
        m.relevance = lexical_relevance(query.context, relevance_text(e));
        finish(std::move(m));
    }
    for (const auto& s : store.semantic()) {
        RetrievedMemory m;
        m.kind = MemoryKind::Semantic;
        m.id = s.id;
        m.text = fmt::format("insight (day {}, confidence {}): {}", s.created_day, text::fixed(s.confidence),
                             s.statement);
        m.day = s.created_day;
        m.timestamp = s.created_at;
        m.importance = s.confidence;
        m.relevance = lexical_relevance(query.context, s.statement);
        finish(std::move(m));
    }
    std::sort(pool.begin(), pool.end(), [](const RetrievedMemory& a, const RetrievedMemory& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.timestamp != b.timestamp) return a.timestamp > b.timestamp;
        return a.id < b.id;
    });
    if (pool.size() > static_cast<std::size_t>(query.top_k)) pool.resize(static_cast<std::size_t>(query.top_k));
    return pool;
}

std::vector<SemanticMemory> reflect(MemoryStore& store, int day, llm::Backend& backend, llm::StageRecord* trace) {
    if (day != store.current_day()) {
        throw OrderViolation(fmt::format("cannot reflect on day {} while on day {}", day, store.current_day()));
    }
    const auto episodes = store.episodes_of_day(day);
    if (episodes.empty()) {
        store.close_day(day);
        return {};
    }
    std::vector<std::string> lines;
    for (const auto& e : episodes) lines.push_back(render_episode_line(e));
    std::vector<std::string> inputs;
    std::set<std::string> known;
    for (const auto& s : store.semantic()) {
        inputs.push_back("Known insight: " + s.statement);
        known.insert(s.statement);
    }
    inputs.push_back(fmt::format("Day: {}", day));

    const auto bundle = llm::assemble_prompt(llm::Stage::Reflect, "", lines, inputs);
    const auto payload = llm::call_with_retries(
        backend, bundle,
        [&](const std::string& raw) {
            auto p = llm::parse_reflection(raw);
            for (const auto& insight : p.insights) {
                for (int idx : insight.supporting) {
                    if (idx < 1 || idx > static_cast<int>(episodes.size())) {
                        throw ParseError(fmt::format("supporting index {} is outside 1..{}", idx, episodes.size()));
                    }
                }
            }
            return p;
        },
        trace);

    MemoryStore next = store;
    std::vector<SemanticMemory> added;
    for (const auto& insight : payload.insights) {
        if (text::trim(insight.statement).empty() || insight.supporting.empty()) continue;
        if (!known.insert(insight.statement).second) continue;
        SemanticMemory m;
        m.statement = insight.statement;
        std::set<int> seen;
        for (int idx : insight.supporting) {
            if (seen.insert(idx).second) m.supporting_episodes.push_back(episodes[idx - 1].id);
        }
        m.created_day = day;
        m.created_at = episodes.back().timestamp;
        m.confidence = std::clamp(insight.confidence, 0.0, 1.0);
        m.id = next.add_semantic(m);
        added.push_back(std::move(m));
    }
    next.close_day(day);
    store = std::move(next);
    return added;
}

}  // namespace robochar
