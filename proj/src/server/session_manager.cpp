#include "robochar/server/session_manager.hpp"

#include "robochar/serialize.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

namespace robochar::server {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kEventsFile = "events.jsonl";
constexpr const char* kSnapshotFile = "snapshot.json";

void write_atomically(const fs::path& file, const std::string& content) {
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, file);
}

void apply_event(RecoveredState& state, const EventLogRecord& event) {
    const json& p = event.payload;
    switch (event.kind) {
        case EventKind::SessionCreated:
            state.config = config_from_json(p.at("config"));
            break;
        case EventKind::Turn: {
            const int store_day = p.at("store_day").get<int>();
            if (store_day > state.store.current_day()) state.store.advance_to(store_day);
            if (!p.at("episode").is_null()) {
                auto episode = p.at("episode").get<EpisodicRecord>();
                const double stated = episode.importance;
                state.store.log_episode(std::move(episode));
                if (std::abs(state.store.episodic().back().importance - stated) > 1e-9) {
                    throw ParseError(fmt::format("event {}: episode importance mismatch", event.sequence));
                }
            }
            state.emotion = p.at("result").at("emotion").get<EmotionState>();
            state.clock = p.at("clock").get<Clock>();
            state.ticks = p.at("ticks").get<std::int64_t>();
            break;
        }
        case EventKind::Reflection: {
            const auto reflection = p.at("reflection").get<DayReflection>();
            for (const auto& m : reflection.memories) state.store.add_semantic(m);
            state.store.close_day(reflection.day);
            state.clock = p.at("clock").get<Clock>();
            break;
        }
        case EventKind::DayAdvanced:
            state.store.close_day(p.at("day").get<int>());
            state.clock = p.at("clock").get<Clock>();
            break;
    }
}

}  // namespace

std::optional<Snapshot> read_snapshot(const fs::path& session_dir) {
    const fs::path file = session_dir / kSnapshotFile;
    if (!fs::exists(file)) return std::nullopt;
    const json j = read_document(file);
    try {
        Snapshot s;
        s.last_sequence = j.at("last_sequence").get<std::int64_t>();
        s.config = config_from_json(j.at("config"));
        s.store = store_from_json(j.at("store"));
        s.emotion = j.at("emotion").get<EmotionState>();
        s.clock = j.at("clock").get<Clock>();
        s.ticks = j.at("ticks").get<std::int64_t>();
        return s;
    } catch (const json::exception& e) {
        throw ParseError(file.string() + ": " + e.what());
    }
}

RecoveredState recover_session(const fs::path& session_dir, bool use_snapshot) {
    const auto events = EventLog::read(session_dir / kEventsFile);
    if (events.empty()) throw ParseError(session_dir.string() + ": event log is empty");
    if (events.front().kind != EventKind::SessionCreated) {
        throw ParseError(session_dir.string() + ": first event is not session_created");
    }
    RecoveredState state;
    state.session_id = events.front().session_id;
    std::int64_t start_after = 0;
    if (use_snapshot) {
        if (auto snap = read_snapshot(session_dir)) {
            state.config = std::move(snap->config);
            state.store = std::move(snap->store);
            state.emotion = snap->emotion;
            state.clock = snap->clock;
            state.ticks = snap->ticks;
            state.last_sequence = snap->last_sequence;
            start_after = snap->last_sequence;
        }
    }
    try {
        for (const auto& event : events) {
            if (event.sequence <= start_after) continue;
            apply_event(state, event);
            state.last_sequence = event.sequence;
            ++state.events_applied;
        }
    } catch (const json::exception& e) {
        throw ParseError(session_dir.string() + ": " + e.what());
    }
    return state;
}

struct SessionManager::Slot {
    std::mutex turn_mutex;
    std::unique_ptr<Session> session;
    std::unique_ptr<EventLog> log;
    fs::path dir;
    int events_since_snapshot = 0;

    mutable std::shared_mutex view_mutex;
    json memory_view;
    json state_view;
};

SessionManager::SessionManager(Options options, BackendFactory factory, SpaceRegistry spaces)
    : options_(std::move(options)), factory_(std::move(factory)), spaces_(std::move(spaces)) {
    if (options_.snapshot_every < 1) throw PreconditionError("snapshot_every must be >= 1");
    if (options_.data_dir) fs::create_directories(*options_.data_dir / "sessions");
}

SessionManager::~SessionManager() = default;

std::string SessionManager::next_id() {
    static thread_local std::mt19937_64 gen{std::random_device{}()};
    const auto n = counter_.fetch_add(1) + 1;
    return fmt::format("s{:04x}{:012x}", n & 0xffff, gen() & 0xffffffffffffULL);
}

std::shared_ptr<SessionManager::Slot> SessionManager::slot(const std::string& session_id) const {
    std::lock_guard lock(slots_mutex_);
    const auto it = slots_.find(session_id);
    if (it == slots_.end()) throw SessionNotFound("no session '" + session_id + "'");
    return it->second;
}

void SessionManager::publish(Slot& s) {
    const Session& session = *s.session;
    json memory{{"session_id", session.id()},
                {"current_day", session.store().current_day()},
                {"episodic", session.store().episodic()},
                {"semantic", session.store().semantic()}};
    json state{{"session_id", session.id()},
               {"name", session.config().name},
               {"profile", profile_to_json(session.config().profile)},
               {"persona_text", session.persona_text()},
               {"space_id", session.config().space_id},
               {"ablation",
                {{"memory_enabled", session.config().ablation.memory_enabled},
                 {"emotion_enabled", session.config().ablation.emotion_enabled}}},
               {"emotion", session.emotion()},
               {"clock", session.clock()},
               {"ticks", session.ticks()}};
    std::unique_lock lock(s.view_mutex);
    s.memory_view = std::move(memory);
    s.state_view = std::move(state);
}

void SessionManager::write_snapshot(Slot& s) {
    if (!s.log) return;
    const Session& session = *s.session;
    const json j{{"schema_version", kSchemaVersion},
                 {"session_id", session.id()},
                 {"last_sequence", s.log->last_sequence()},
                 {"config", config_to_json(session.config())},
                 {"store", store_to_json(session.store())},
                 {"emotion", session.emotion()},
                 {"clock", session.clock()},
                 {"ticks", session.ticks()}};
    write_atomically(s.dir / kSnapshotFile, dump_document(j));
    s.events_since_snapshot = 0;
}

void SessionManager::after_event(Slot& s) {
    if (!s.log) return;
    if (++s.events_since_snapshot >= options_.snapshot_every) write_snapshot(s);
}

std::string SessionManager::create_session(const AgentConfig& config) {
    std::string id = next_id();
    auto s = std::make_shared<Slot>();
    s->session = std::make_unique<Session>(new_session(config, factory_(config.backend), spaces_, id));
    if (options_.data_dir) {
        s->dir = *options_.data_dir / "sessions" / id;
        fs::create_directories(s->dir);
        s->log = std::make_unique<EventLog>(s->dir / kEventsFile, id);
        s->log->append(EventKind::SessionCreated, json{{"config", config_to_json(config)}});
        write_snapshot(*s);
    }
    publish(*s);
    std::lock_guard lock(slots_mutex_);
    slots_.emplace(id, std::move(s));
    return id;
}

json SessionManager::post_turn(const std::string& session_id, HumanInput input) {
    auto s = slot(session_id);
    std::unique_lock turn(s->turn_mutex, std::try_to_lock);
    if (!turn.owns_lock()) throw SessionBusy("session '" + session_id + "' is processing another request");
    Session& session = *s->session;
    if (input.day == 0) input.day = session.clock().day;
    const TurnResult result = session.step(std::move(input));
    if (s->log) {
        json episode = nullptr;
        if (result.episode_id) episode = *session.store().find_episode(*result.episode_id);
        s->log->append(EventKind::Turn, json{{"result", result},
                                             {"episode", episode},
                                             {"clock", session.clock()},
                                             {"ticks", session.ticks()},
                                             {"store_day", session.store().current_day()}});
        after_event(*s);
    }
    publish(*s);
    return json(result);
}

json SessionManager::end_day(const std::string& session_id) {
    auto s = slot(session_id);
    std::unique_lock turn(s->turn_mutex, std::try_to_lock);
    if (!turn.owns_lock()) throw SessionBusy("session '" + session_id + "' is processing another request");
    Session& session = *s->session;
    const DayReflection reflection = session.end_day();
    if (s->log) {
        if (session.config().ablation.memory_enabled) {
            s->log->append(EventKind::Reflection, json{{"reflection", reflection}, {"clock", session.clock()}});
        } else {
            s->log->append(EventKind::DayAdvanced, json{{"day", reflection.day}, {"clock", session.clock()}});
        }
        write_snapshot(*s);
    }
    publish(*s);
    return json(reflection);
}

json SessionManager::get_memory(const std::string& session_id) const {
    auto s = slot(session_id);
    std::shared_lock lock(s->view_mutex);
    return s->memory_view;
}

json SessionManager::get_state(const std::string& session_id) const {
    auto s = slot(session_id);
    std::shared_lock lock(s->view_mutex);
    return s->state_view;
}

std::vector<std::string> SessionManager::session_ids() const {
    std::lock_guard lock(slots_mutex_);
    std::vector<std::string> ids;
    for (const auto& [id, s] : slots_) ids.push_back(id);
    return ids;
}

std::size_t SessionManager::load_existing() {
    if (!options_.data_dir) return 0;
    std::size_t loaded = 0;
    const fs::path root = *options_.data_dir / "sessions";
    if (!fs::exists(root)) return 0;
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && fs::exists(entry.path() / kEventsFile)) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
        try {
            RecoveredState state = recover_session(dir, true);
            auto s = std::make_shared<Slot>();
            s->dir = dir;
            s->session = std::make_unique<Session>(
                new_session(state.config, factory_(state.config.backend), spaces_, state.session_id));
            s->session->restore(std::move(state.store), state.emotion, state.clock, state.ticks);
            s->log = std::make_unique<EventLog>(dir / kEventsFile, state.session_id);
            s->events_since_snapshot = static_cast<int>(state.events_applied);
            publish(*s);
            std::lock_guard lock(slots_mutex_);
            slots_.insert_or_assign(state.session_id, std::move(s));
            ++loaded;
        } catch (const std::exception& e) {
            fmt::print(stderr, "robochar: skipping session at {}: {}\n", dir.string(), e.what());
        }
    }
    return loaded;
}

}  // namespace robochar::server
