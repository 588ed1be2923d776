#include "robochar/server/event_log.hpp"

#include "robochar/errors.hpp"

#include <fmt/format.h>

#include <chrono>
#include <ctime>
#include <sstream>

namespace robochar::server {

using nlohmann::json;

std::string_view event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::SessionCreated: return "session_created";
        case EventKind::Turn: return "turn";
        case EventKind::Reflection: return "reflection";
        case EventKind::DayAdvanced: return "day_advanced";
    }
    return "turn";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    for (auto k : {EventKind::SessionCreated, EventKind::Turn, EventKind::Reflection, EventKind::DayAdvanced}) {
        if (event_kind_name(k) == text) return k;
    }
    return std::nullopt;
}

json EventLogRecord::to_json() const {
    return json{{"session_id", session_id},
                {"seq", sequence},
                {"kind", event_kind_name(kind)},
                {"payload", payload},
                {"wall_time", wall_time}};
}

EventLogRecord EventLogRecord::from_json(const json& j) {
    EventLogRecord r;
    try {
        r.session_id = j.at("session_id").get<std::string>();
        r.sequence = j.at("seq").get<std::int64_t>();
        const auto kind = j.at("kind").get<std::string>();
        const auto parsed = parse_event_kind(kind);
        if (!parsed) throw ParseError("unknown event kind '" + kind + "'");
        r.kind = *parsed;
        r.payload = j.at("payload");
        r.wall_time = j.value("wall_time", "");
    } catch (const json::exception& e) {
        throw ParseError(std::string("event record: ") + e.what());
    }
    return r;
}

std::string utc_now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::tm tm{};
    gmtime_r(&t, &tm);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}.{:03}Z", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                       tm.tm_hour, tm.tm_min, tm.tm_sec, ms);
}

namespace {

// Drops an unterminated final line left behind by a killed writer.
void trim_torn_tail(const std::filesystem::path& file) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(file, ec);
    if (ec || size == 0) return;
    std::ifstream in(file, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (content.back() == '\n') return;
    const auto last_newline = content.rfind('\n');
    std::filesystem::resize_file(file, last_newline == std::string::npos ? 0 : last_newline + 1);
}

}  // namespace

EventLog::EventLog(std::filesystem::path file, std::string session_id)
    : path_(std::move(file)), session_id_(std::move(session_id)) {
    if (std::filesystem::exists(path_)) {
        trim_torn_tail(path_);
        const auto existing = read(path_);
        if (!existing.empty()) last_sequence_ = existing.back().sequence;
    }
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw PreconditionError("cannot open event log " + path_.string());
}

EventLogRecord EventLog::append(EventKind kind, json payload) {
    std::lock_guard lock(mutex_);
    EventLogRecord r;
    r.session_id = session_id_;
    r.sequence = last_sequence_ + 1;
    r.kind = kind;
    r.payload = std::move(payload);
    r.wall_time = utc_now_iso8601();
    out_ << r.to_json().dump() << '\n';
    out_.flush();
    if (!out_) throw Error("write to " + path_.string() + " failed");
    last_sequence_ = r.sequence;
    return r;
}

std::int64_t EventLog::last_sequence() const {
    std::lock_guard lock(mutex_);
    return last_sequence_;
}

std::vector<EventLogRecord> EventLog::read(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw PreconditionError("cannot open event log " + file.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<EventLogRecord> out;
    std::size_t pos = 0;
    std::int64_t line_no = 0;
    while (pos < content.size()) {
        const auto end = content.find('\n', pos);
        const bool terminated = end != std::string::npos;
        const std::string line = content.substr(pos, terminated ? end - pos : std::string::npos);
        pos = terminated ? end + 1 : content.size();
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            if (!terminated) break;
            throw ParseError(fmt::format("{}: line {} is not valid JSON", file.string(), line_no));
        }
        auto record = EventLogRecord::from_json(j);
        if (!out.empty() && record.sequence <= out.back().sequence) {
            throw ParseError(fmt::format("{}: line {} sequence {} does not increase", file.string(), line_no,
                                         record.sequence));
        }
        out.push_back(std::move(record));
    }
    return out;
}

}  // namespace robochar::server
