#include "robochar/action.hpp"
#include "robochar/appraisal.hpp"
#include "robochar/engine.hpp"
#include "robochar/llm/mock_backend.hpp"
#include "robochar/llm/scripted_backend.hpp"
#include "robochar/memory.hpp"
#include "robochar/scenario.hpp"
#include "robochar/serialize.hpp"
#include "robochar/server/event_log.hpp"
#include "robochar/server/http_api.hpp"
#include "robochar/server/session_manager.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

using namespace robochar;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

fs::path data_path(const std::string& rel) {
    return fs::path(ROBOCHAR_SOURCE_DATA_DIR) / rel;
}

AgentConfig config(const std::string& name) {
    return load_config(data_path("configs/" + name + ".json"));
}

std::vector<HumanInput> ella_inputs() {
    return load_script(data_path("scripts/ella_arc.json")).inputs();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome check(bool ok, std::string detail) {
    return {ok, std::move(detail)};
}

Outcome persona_distinctness() {
    const auto start = std::chrono::steady_clock::now();
    const auto report = run_matrix(load_script(data_path("scripts/ella_arc.json")),
                                   {config("adam"), config("bella"), config("caleb")});
    const double elapsed = seconds_since(start);
    if (report.turns.size() < 2) return check(false, "script has fewer than two turns");
    for (const auto& c : report.configs) {
        if (c.error) return check(false, c.name + " failed: " + *c.error);
    }
    const double r1 = report.turns[0].distinct_rate;
    const double r2 = report.turns[1].distinct_rate;
    return check(r1 == 1.0 && r2 == 1.0 && elapsed < 5.0,
                 fmt::format("distinct rate I={:.2f} II={:.2f}, {:.3f}s", r1, r2, elapsed));
}

Outcome memory_ablation() {
    const auto start = std::chrono::steady_clock::now();
    const auto inputs = ella_inputs();
    auto with = new_session(config("caleb"));
    auto without = new_session(config("caleb_no_memory"));
    bool store_empty = true;
    std::vector<TurnResult> on;
    std::vector<TurnResult> off;
    for (const auto& in : inputs) {
        if (in.day > with.clock().day) with.end_day();
        if (in.day > without.clock().day) without.end_day();
        store_empty = store_empty && without.store().empty();
        on.push_back(with.step(in));
        off.push_back(without.step(in));
        store_empty = store_empty && without.store().empty() && off.back().retrieved.empty();
    }
    without.end_day();
    store_empty = store_empty && without.store().empty();
    const double elapsed = seconds_since(start);

    const auto& on4 = on.at(3);
    const auto& off4 = off.at(3);
    std::size_t first_divergent = on.size();
    for (std::size_t i = 0; i < on.size() && first_divergent == on.size(); ++i) {
        if (!(on[i].selection == off[i].selection)) first_divergent = i;
    }
    const bool diverged = describe_selection(on4.selection) != describe_selection(off4.selection);
    const bool on_exam = on4.appraisal.inferred_intent.find("exam") != std::string::npos;
    const bool off_exam = off4.appraisal.inferred_intent.find("exam") != std::string::npos;
    return check(store_empty && diverged && on_exam && !off_exam && elapsed < 5.0,
                 fmt::format("first divergent turn {}; IV: on={} '{}' / off={} '{}', store empty={}, {:.3f}s",
                             first_divergent + 1, describe_selection(on4.selection), on4.appraisal.inferred_intent,
                             describe_selection(off4.selection), off4.appraisal.inferred_intent, store_empty,
                             elapsed));
}

Outcome emotion_ablation() {
    const auto inputs = ella_inputs();
    const auto on = replay(config("caleb"), inputs);
    const auto off = replay(config("caleb_no_emotion"), inputs);
    const auto on_turns = on.turns();
    const auto off_turns = off.turns();
    bool neutral = !off_turns.empty();
    for (const auto* t : off_turns) {
        neutral = neutral && t->emotion == EmotionState::neutral() && t->emotion.intensity == 0.0;
    }
    const double v_on = on_turns.at(2)->appraisal.valence;
    const double v_off = off_turns.at(2)->appraisal.valence;
    return check(v_on <= -0.3 && v_off >= 0.3 && neutral,
                 fmt::format("III valence on={:.2f} off={:.2f}, off neutral on all turns={}", v_on, v_off, neutral));
}

Outcome reflection() {
    MemoryStore store;
    std::vector<std::string> ids;
    const std::vector<std::string> motions{"dance", "spin", "wave"};
    for (int i = 0; i < 3; ++i) {
        EpisodicRecord r;
        r.day = 1;
        r.timestamp = i + 1;
        r.human_action = "I feel down today";
        r.human_valence = -0.4;
        r.robot_response.action_id = "perform_motion";
        r.robot_response.bindings["motion"] = motions[static_cast<std::size_t>(i)];
        r.robot_response.utterance = "Watch this!";
        r.robot_emotion.label = EmotionLabel::Amusement;
        r.observed_reaction = "laughs";
        r.reaction_valence = 0.6 + 0.1 * i;
        ids.push_back(store.log_episode(r));
    }
    llm::MockBackend mock(llm::BackendConfig{});
    const auto added = reflect(store, 1, mock);
    for (const auto& m : added) {
        const std::set<std::string> cited(m.supporting_episodes.begin(), m.supporting_episodes.end());
        const bool all = std::all_of(ids.begin(), ids.end(), [&](const auto& id) { return cited.count(id) > 0; });
        if (all && m.confidence >= 0.0 && m.confidence <= 1.0) {
            return check(true, fmt::format("'{}' cites {} episodes, confidence {:.2f}", m.statement,
                                           m.supporting_episodes.size(), m.confidence));
        }
    }
    return check(false, fmt::format("{} insights, none citing all three episodes", added.size()));
}

EpisodicRecord random_episode(std::mt19937_64& rng, int day, std::int64_t ts) {
    static const std::vector<std::string> words{"exam", "dinner", "steak", "mike", "fluids", "dance",
                                                "tea", "curve", "final", "sad", "happy", "plate"};
    static const std::vector<std::string> actions{"speak_only", "perform_motion", "pick_place"};
    std::uniform_real_distribution<double> signed_unit(-1.0, 1.0);
    EpisodicRecord r;
    r.day = day;
    r.timestamp = ts;
    for (int w = 1 + static_cast<int>(rng() % 4); w > 0; --w) r.human_action += words[rng() % words.size()] + " ";
    r.human_valence = signed_unit(rng);
    r.robot_response.action_id = actions[rng() % actions.size()];
    if (r.robot_response.action_id == "perform_motion") r.robot_response.bindings["motion"] = "dance";
    if (r.robot_response.action_id == "pick_place") r.robot_response.bindings["object"] = "plate";
    r.reaction_valence = signed_unit(rng);
    return r;
}

Outcome retrieval_properties() {
    constexpr int kStores = 1000;
    static const std::vector<std::string> queries{"exam curve mike", "dinner steak", "dance", "", "tea final sad"};
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    for (int round = 0; round < kStores; ++round) {
        MemoryStore store;
        std::int64_t ts = 0;
        const int days = 1 + static_cast<int>(rng() % 5);
        for (int day = 1; day <= days; ++day) {
            if (day > store.current_day()) store.advance_to(day);
            std::vector<std::string> today;
            for (int k = static_cast<int>(rng() % 6); k > 0; --k) {
                ts += 1 + static_cast<std::int64_t>(rng() % 3);
                today.push_back(store.log_episode(random_episode(rng, day, ts)));
            }
            if (!today.empty() && rng() % 2 == 0) {
                SemanticMemory s;
                s.statement = "insight about dinner";
                s.supporting_episodes = {today[rng() % today.size()]};
                s.created_day = day;
                s.created_at = ts;
                s.confidence = unit(rng);
                store.add_semantic(s);
            }
            if (rng() % 2 == 0) store.close_day(day);
        }
        const int day = store.current_day();
        auto twin = random_episode(rng, day, store.last_timestamp() + 1);
        const auto older = store.log_episode(twin);
        twin.id.clear();
        twin.timestamp += 1;
        const auto newer = store.log_episode(twin);

        const std::size_t total = store.episodic().size() + store.semantic().size();
        const int top_k = 1 + static_cast<int>(rng() % 8);
        const RetrievalQuery q{queries[rng() % queries.size()], day + static_cast<int>(rng() % 3),
                               store.last_timestamp() + static_cast<std::int64_t>(rng() % 5), top_k};
        const auto r = retrieve(store, q);
        if (r.size() != std::min(total, static_cast<std::size_t>(top_k))) {
            return check(false, fmt::format("store {}: {} results for top_k {}", round, r.size(), top_k));
        }
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!(r[i].score >= 0.0 && r[i].score <= 1.0)) {
                return check(false, fmt::format("store {}: score {} out of range", round, r[i].score));
            }
            if (i > 0 && r[i - 1].score < r[i].score) return check(false, fmt::format("store {}: unsorted", round));
        }
        RetrievalQuery all = q;
        all.top_k = static_cast<int>(total);
        const auto full = retrieve(store, all);
        const auto pos = [&](const std::string& id) {
            return std::find_if(full.begin(), full.end(), [&](const auto& m) { return m.id == id; }) - full.begin();
        };
        if (!(pos(newer) < pos(older))) return check(false, fmt::format("store {}: older twin ranked first", round));
        ++checked;
    }
    return check(checked == kStores, fmt::format("{} randomized stores", checked));
}

Outcome determinism() {
    const auto inputs = ella_inputs();
    const fs::path dir = fs::temp_directory_path() / fmt::format("robochar_accept_{}", ::getpid());
    fs::create_directories(dir);
    std::vector<std::string> bytes;
    for (int run = 0; run < 2; ++run) {
        const fs::path file = dir / fmt::format("transcript_{}.json", run);
        {
            std::ofstream out(file, std::ios::binary | std::ios::trunc);
            out << dump_document(transcript_to_json(replay(config("bella"), inputs)));
        }
        std::ifstream in(file, std::ios::binary);
        bytes.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    fs::remove_all(dir);
    return check(!bytes[0].empty() && bytes[0] == bytes[1],
                 fmt::format("two transcripts of {} bytes, identical={}", bytes[0].size(), bytes[0] == bytes[1]));
}

Outcome action_safety() {
    constexpr int kRounds = 1000;
    const auto& space = default_kitchen_space();
    const std::vector<std::string> ids{"brew_drink", "fetch_ingredient", "pick_place", "perform_motion",
                                       "speak_only", "launch_rocket", "", "Speak_Only"};
    const std::vector<std::string> values{"tea", "steak", "unicorn", "", " ", "dance", "plate", "knife"};
    const std::vector<std::string> params{"drink", "object", "motion", "target"};
    std::mt19937_64 rng(99);
    auto reply = [&]() -> std::string {
        switch (rng() % 7) {
            case 0: return "I'd rather not answer in JSON.";
            case 1: return R"({"action_id": ["speak_only"]})";
            case 2: return R"({"action_id":"brew_drink","bindings":{"drink":"tea"}})";
            case 3: return "```json\n{\"action_id\":\"fly\"}\n```";
            default: break;
        }
        json j;
        j["action_id"] = ids[rng() % ids.size()];
        j["bindings"] = json::object();
        for (int k = static_cast<int>(rng() % 3); k > 0; --k) {
            j["bindings"][params[rng() % params.size()]] = values[rng() % values.size()];
        }
        j["utterance"] = "ok";
        return j.dump();
    };
    HumanInput input;
    input.utterance = "I'm so stressed about the exam.";
    const auto profile = from_parameters(TraitLevels{});
    int fallbacks = 0;
    for (int round = 0; round < kRounds; ++round) {
        llm::BackendConfig cfg;
        cfg.retry_budget = static_cast<int>(rng() % 4);
        std::vector<std::string> replies;
        for (int k = 0; k <= cfg.retry_budget; ++k) replies.push_back(reply());
        llm::ScriptedBackend backend(replies, cfg);
        llm::StageRecord trace;
        const auto s = select_action(input, EmotionState{}, AppraisalRecord{}, profile, {}, space, backend, &trace);
        const auto budget_calls = static_cast<std::size_t>(cfg.retry_budget + 1);
        if (!validate_selection(s, space).empty()) {
            return check(false, fmt::format("round {}: invalid {}", round, describe_selection(s)));
        }
        if (backend.calls() > budget_calls) return check(false, fmt::format("round {}: {} calls", round, backend.calls()));
        if (trace.fallback) {
            ++fallbacks;
            if (backend.calls() != budget_calls) {
                return check(false, fmt::format("round {}: fallback after {} calls", round, backend.calls()));
            }
        }
    }
    return check(true, fmt::format("{} adversarial rounds, {} fallbacks, all valid", kRounds, fallbacks));
}

double clamp01(double x) {
    return std::min(1.0, std::max(0.0, x));
}

Outcome emotion_formulas() {
    const std::vector<TraitLevel> all{TraitLevel::Low, TraitLevel::MediumLow, TraitLevel::Medium,
                                      TraitLevel::MediumHigh, TraitLevel::High};
    const double level_value[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    double worst = 0.0;
    int points = 0;
    for (int vi = -10; vi <= 10; ++vi) {
        for (int ii = 0; ii <= 10; ++ii) {
            for (std::size_t e = 0; e < all.size(); ++e) {
                for (std::size_t n = 0; n < all.size(); ++n) {
                    TraitLevels levels;
                    levels.extraversion = all[e];
                    levels.neuroticism = all[n];
                    const auto profile = from_parameters(levels);
                    AppraisalRecord a;
                    a.valence = vi / 10.0;
                    a.impact = ii / 10.0;
                    a.relevance = 0.5;
                    const auto s = derive_emotion(a, profile, EmotionState{}, true);
                    const double intensity =
                        clamp01(a.impact * (1.0 + (a.valence < 0 ? 0.5 * (level_value[n] - 0.5) : 0.0)));
                    const double arousal = clamp01(a.impact * (0.5 + level_value[e]));
                    worst = std::max({worst, std::abs(s.intensity - intensity), std::abs(s.arousal - arousal),
                                      std::abs(s.valence - a.valence)});
                    ++points;
                }
            }
        }
    }
    return check(worst <= 1e-9, fmt::format("{} grid points, max error {:.3g}", points, worst));
}

// Runs the HTTP server in a child process, drives turns over HTTP, kills the
// child with SIGKILL mid-run and rebuilds the session from disk.
Outcome crash_recovery() {
    const fs::path dir = fs::temp_directory_path() / fmt::format("robochar_crash_{}", ::getpid());
    fs::remove_all(dir);
    fs::create_directories(dir);
    int port_pipe[2];
    if (::pipe(port_pipe) != 0) return check(false, "pipe failed");

    const pid_t child = ::fork();
    if (child < 0) return check(false, "fork failed");
    if (child == 0) {
        ::close(port_pipe[0]);
        server::SessionManager manager({dir, 4});
        server::ApiServer api(manager);
        const int port = api.bind_any_port("127.0.0.1");
        if (::write(port_pipe[1], &port, sizeof port) != sizeof port) ::_exit(2);
        ::close(port_pipe[1]);
        api.listen_after_bind();
        ::_exit(0);
    }
    ::close(port_pipe[1]);
    int port = 0;
    const bool got_port = ::read(port_pipe[0], &port, sizeof port) == sizeof port;
    ::close(port_pipe[0]);
    auto kill_child = [&] {
        ::kill(child, SIGKILL);
        int status = 0;
        ::waitpid(child, &status, 0);
        return WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL;
    };
    if (!got_port || port <= 0) {
        kill_child();
        return check(false, "server did not start");
    }

    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    const auto created = client.Post("/v1/sessions", read_document(data_path("configs/bella.json")).dump(),
                                     "application/json");
    if (!created || created->status != 201) {
        kill_child();
        return check(false, "session create failed");
    }
    const std::string id = json::parse(created->body).at("session_id").get<std::string>();

    const auto ella = ella_inputs();
    std::atomic<int> completed{0};
    std::thread driver([&] {
        for (int i = 0;; ++i) {
            HumanInput in = ella[static_cast<std::size_t>(i) % ella.size()];
            const json body{{"utterance", in.utterance}, {"cues", in.cues}, {"observed_reaction", "smiles"}};
            const bool close_day = i % 3 == 2;
            const auto r = close_day ? client.Post("/v1/sessions/" + id + "/end_day", "{}", "application/json")
                                     : client.Post("/v1/sessions/" + id + "/turns", body.dump(), "application/json");
            if (!r || r->status != 200) return;
            completed.fetch_add(1);
        }
    });
    while (completed.load() < 14) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    const bool killed = kill_child();
    driver.join();

    const fs::path sdir = dir / "sessions" / id;
    Outcome result;
    try {
        const auto snapshot = server::read_snapshot(sdir);
        const auto events = server::EventLog::read(sdir / "events.jsonl");
        const auto recovered = server::recover_session(sdir, true);
        const auto scratch = server::recover_session(sdir, false);

        // Independent rebuild: a fresh session fed the logged inputs.
        auto reference = new_session(config("bella"));
        for (const auto& e : events) {
            if (e.kind == server::EventKind::Turn) {
                auto in = e.payload.at("result").at("input").get<HumanInput>();
                reference.step(in);
            } else if (e.kind == server::EventKind::Reflection) {
                reference.end_day();
            }
        }
        const bool matches_reference = recovered.store == reference.store() &&
                                       recovered.emotion == reference.emotion() &&
                                       recovered.clock == reference.clock() && recovered.ticks == reference.ticks();
        const bool matches_scratch = recovered.store == scratch.store && recovered.emotion == scratch.emotion &&
                                     recovered.clock == scratch.clock && recovered.ticks == scratch.ticks;
        const bool used_snapshot = snapshot.has_value() && snapshot->last_sequence <= recovered.last_sequence &&
                                   recovered.last_sequence == events.back().sequence;
        result = check(killed && matches_reference && matches_scratch && used_snapshot,
                       fmt::format("killed={} after {} requests; snapshot seq {} + {} logged events -> {} episodes, "
                                   "{} insights; matches rebuild={} scratch={}",
                                   killed, completed.load(), snapshot ? snapshot->last_sequence : -1,
                                   recovered.events_applied, recovered.store.episodic().size(),
                                   recovered.store.semantic().size(), matches_reference, matches_scratch));
    } catch (const std::exception& e) {
        result = check(false, std::string("recovery threw: ") + e.what());
    }
    fs::remove_all(dir);
    return result;
}

Outcome guarded(const std::function<Outcome()>& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return check(false, std::string("threw: ") + e.what());
    }
}

}  // namespace

int main() {
    // Fork before any other work so the child starts from a single-threaded process.
    const Outcome recovery = guarded(crash_recovery);

    const std::vector<std::pair<std::string, Outcome>> results{
        {"persona distinctness", guarded(persona_distinctness)},
        {"memory ablation", guarded(memory_ablation)},
        {"emotion ablation", guarded(emotion_ablation)},
        {"reflection", guarded(reflection)},
        {"retrieval properties", guarded(retrieval_properties)},
        {"determinism", guarded(determinism)},
        {"action safety", guarded(action_safety)},
        {"emotion formulas", guarded(emotion_formulas)},
        {"crash recovery", recovery},
    };
    bool all = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& [name, outcome] = results[i];
        fmt::print("{} criterion {}: {} ({})\n", outcome.passed ? "PASS" : "FAIL", i + 1, name, outcome.detail);
        all = all && outcome.passed;
    }
    return all ? 0 : 1;
}
