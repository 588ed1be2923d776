#pragma once

#include "robochar/engine.hpp"
#include "robochar/errors.hpp"
#include "robochar/server/event_log.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

namespace robochar::server {

class SessionNotFound : public Error {
public:
    using Error::Error;
};

// Another mutating request is running for the same session.
class SessionBusy : public Error {
public:
    using Error::Error;
};

using BackendFactory = std::function<std::unique_ptr<llm::Backend>(const llm::BackendConfig&)>;

// Session state rebuilt from a snapshot plus the events logged after it.
struct RecoveredState {
    std::string session_id;
    AgentConfig config;
    MemoryStore store;
    EmotionState emotion;
    Clock clock;
    std::int64_t ticks = 0;
    std::int64_t last_sequence = 0;
    std::size_t events_applied = 0;  // events replayed on top of the snapshot
};

// Snapshot file contents as written by the manager.
struct Snapshot {
    std::int64_t last_sequence = 0;
    AgentConfig config;
    MemoryStore store;
    EmotionState emotion;
    Clock clock;
    std::int64_t ticks = 0;
};

std::optional<Snapshot> read_snapshot(const std::filesystem::path& session_dir);

// Replays <session_dir>/events.jsonl. With `use_snapshot`, starts from
// snapshot.json and applies only later events; otherwise rebuilds from the
// first event.
RecoveredState recover_session(const std::filesystem::path& session_dir, bool use_snapshot = true);

// Owns live sessions. Each session has one turn lock: a second mutating
// request while one is running fails with SessionBusy instead of queueing.
// Reads return the view published by the last completed mutation.
class SessionManager {
public:
    struct Options {
        std::optional<std::filesystem::path> data_dir;
        // Write snapshot.json after this many events (and after each end_day).
        int snapshot_every = 8;
    };

    explicit SessionManager(Options options, BackendFactory factory = llm::make_backend,
                            SpaceRegistry spaces = SpaceRegistry::builtin());
    ~SessionManager();

    // Re-opens every session found under data_dir. Returns the count.
    std::size_t load_existing();

    std::string create_session(const AgentConfig& config);
    nlohmann::json post_turn(const std::string& session_id, HumanInput input);
    nlohmann::json end_day(const std::string& session_id);
    nlohmann::json get_memory(const std::string& session_id) const;
    nlohmann::json get_state(const std::string& session_id) const;

    std::vector<std::string> session_ids() const;
    const SpaceRegistry& spaces() const noexcept { return spaces_; }

private:
    struct Slot;

    std::shared_ptr<Slot> slot(const std::string& session_id) const;
    void publish(Slot& slot);
    void after_event(Slot& slot);
    void write_snapshot(Slot& slot);
    std::string next_id();

    Options options_;
    BackendFactory factory_;
    SpaceRegistry spaces_;
    mutable std::mutex slots_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> slots_;
    std::atomic<std::uint64_t> counter_{0};
};

}  // namespace robochar::server
