#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robochar::server {

enum class EventKind { SessionCreated, Turn, Reflection, DayAdvanced };

std::string_view event_kind_name(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct EventLogRecord {
    std::string session_id;
    std::int64_t sequence = 0;
    EventKind kind = EventKind::Turn;
    nlohmann::json payload;
    std::string wall_time;  // UTC, ISO-8601

    nlohmann::json to_json() const;
    static EventLogRecord from_json(const nlohmann::json& j);
};

// Append-only JSON-lines log for one session. Each append is flushed before
// returning, so a killed process loses at most the line being written.
class EventLog {
public:
    EventLog(std::filesystem::path file, std::string session_id);

    EventLogRecord append(EventKind kind, nlohmann::json payload);

    std::int64_t last_sequence() const;
    const std::filesystem::path& path() const noexcept { return path_; }

    // All complete records in file order. A torn final line is skipped;
    // a torn line anywhere else, or a sequence that does not increase,
    // throws ParseError.
    static std::vector<EventLogRecord> read(const std::filesystem::path& file);

private:
    std::filesystem::path path_;
    std::string session_id_;
    std::ofstream out_;
    std::int64_t last_sequence_ = 0;
    mutable std::mutex mutex_;
};

std::string utc_now_iso8601();

}  // namespace robochar::server
