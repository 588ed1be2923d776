// robochar: run scripted comparisons, chat with a character, serve the HTTP
// API, or validate documents.

#include "robochar/action.hpp"
#include "robochar/engine.hpp"
#include "robochar/scenario.hpp"
#include "robochar/serialize.hpp"
#include "robochar/server/http_api.hpp"
#include "robochar/server/session_manager.hpp"
#include "robochar/text.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <fstream>
#include <iostream>

namespace {

using namespace robochar;

struct BackendOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> kind;
    std::optional<std::string> endpoint;

    void apply(AgentConfig& config) const {
        if (seed) config.backend.seed = *seed;
        if (kind) config.backend.kind = *kind == "http" ? llm::BackendKind::Http : llm::BackendKind::Mock;
        if (endpoint) config.backend.endpoint = *endpoint;
        config.backend.validate();
    }
};

void add_backend_options(CLI::App* cmd, BackendOverrides& o) {
    cmd->add_option("--seed", o.seed, "Override the backend seed");
    cmd->add_option("--backend", o.kind, "Override the backend kind")->check(CLI::IsMember({"mock", "http"}));
    cmd->add_option("--endpoint", o.endpoint, "Chat-completion base URL for --backend http");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PreconditionError("cannot write " + path);
    out << content;
}

int run_scenario(const std::string& script_path, const std::vector<std::string>& config_paths,
                 const BackendOverrides& overrides, bool parallel, const std::string& json_out,
                 const std::string& transcript_dir) {
    const Script script = load_script(script_path);
    std::vector<AgentConfig> configs;
    for (const auto& p : config_paths) {
        auto c = load_config(p);
        overrides.apply(c);
        configs.push_back(std::move(c));
    }
    const ComparisonReport report = run_matrix(script, configs, SpaceRegistry::builtin(), parallel);
    std::cout << render_report_table(report);
    if (!json_out.empty()) write_file(json_out, dump_document(report_to_json(report)));
    if (!transcript_dir.empty()) {
        std::filesystem::create_directories(transcript_dir);
        for (std::size_t i = 0; i < report.configs.size(); ++i) {
            const auto& outcome = report.configs[i];
            if (!outcome.transcript) continue;
            write_file(fmt::format("{}/{:02}.json", transcript_dir, i),
                       dump_document(transcript_to_json(*outcome.transcript)));
        }
    }
    return report.all_checks_passed() ? 0 : 1;
}

// One line per turn: "utterance | cue, cue". Lines starting with '/' are
// commands: /end_day, /memory, /state, /quit.
int chat(const std::string& config_path, const BackendOverrides& overrides) {
    AgentConfig config = load_config(config_path);
    overrides.apply(config);
    Session session = new_session(config);
    fmt::print("{} on day {}. Type /quit to leave.\n", config.name, session.clock().day);
    std::string line;
    while (std::cout << "> " << std::flush, std::getline(std::cin, line)) {
        line = text::trim(line);
        if (line.empty()) continue;
        try {
            if (line == "/quit") break;
            if (line == "/end_day") {
                const auto r = session.end_day();
                fmt::print("day {} closed, {} new insights\n", r.day, r.memories.size());
                for (const auto& m : r.memories) fmt::print("  - {} ({})\n", m.statement, text::fixed(m.confidence));
                continue;
            }
            if (line == "/memory") {
                std::cout << dump_document(store_to_json(session.store()));
                continue;
            }
            if (line == "/state") {
                fmt::print("day {} turn {} emotion {}\n", session.clock().day, session.clock().turn,
                           emotion_name(session.emotion().label));
                continue;
            }
            HumanInput input;
            const auto bar = line.find('|');
            input.utterance = text::trim(line.substr(0, bar));
            if (bar != std::string::npos) {
                std::string rest = line.substr(bar + 1);
                std::size_t pos = 0;
                while (pos <= rest.size()) {
                    const auto comma = rest.find(',', pos);
                    const auto cue = text::trim(rest.substr(pos, comma == std::string::npos ? std::string::npos
                                                                                           : comma - pos));
                    if (!cue.empty()) input.cues.push_back(cue);
                    if (comma == std::string::npos) break;
                    pos = comma + 1;
                }
            }
            input.day = session.clock().day;
            const auto r = session.step(std::move(input));
            fmt::print("[{} {}] {}\n  \"{}\"\n", emotion_name(r.emotion.label), text::fixed(r.emotion.intensity),
                       describe_selection(r.selection), r.selection.utterance);
        } catch (const Error& e) {
            fmt::print(stderr, "error: {}\n", e.what());
        }
    }
    return 0;
}

server::ApiServer* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

int serve(const std::string& host, int port, const std::string& data_dir, int snapshot_every) {
    server::SessionManager::Options options;
    if (!data_dir.empty()) options.data_dir = data_dir;
    options.snapshot_every = snapshot_every;
    server::SessionManager manager(options);
    const auto loaded = manager.load_existing();
    server::ApiServer api(manager);
    g_server = &api;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    if (port == 0) {
        port = api.bind_any_port(host);
        if (port < 0) throw Error("cannot bind " + host);
        fmt::print("listening on http://{}:{} ({} sessions restored)\n", host, port, loaded);
        std::fflush(stdout);
        api.listen_after_bind();
    } else {
        fmt::print("listening on http://{}:{} ({} sessions restored)\n", host, port, loaded);
        std::fflush(stdout);
        if (!api.listen(host, port)) throw Error(fmt::format("cannot listen on {}:{}", host, port));
    }
    g_server = nullptr;
    return 0;
}

enum class DocKind { Infer, Config, Script, Space };

int validate(const std::vector<std::pair<std::string, DocKind>>& docs) {
    int failures = 0;
    for (const auto& [path, requested] : docs) {
        try {
            const json doc = read_document(path);
            DocKind kind = requested;
            if (kind == DocKind::Infer) {
                kind = doc.is_object() && doc.contains("turns")     ? DocKind::Script
                       : doc.is_object() && doc.contains("actions") ? DocKind::Space
                                                                    : DocKind::Config;
            }
            std::string_view name;
            switch (kind) {
                case DocKind::Script:
                    name = "script";
                    load_script(path);
                    break;
                case DocKind::Space:
                    name = "space";
                    space_from_json(doc);
                    break;
                default:
                    name = "config";
                    config_from_json(doc);
                    break;
            }
            fmt::print("ok      {} ({})\n", path, name);
        } catch (const ValidationError& e) {
            ++failures;
            fmt::print("invalid {}: field {}: {}\n", path, e.field(), e.what());
        } catch (const std::exception& e) {
            ++failures;
            fmt::print("invalid {}: {}\n", path, e.what());
        }
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Personality-driven robot character runtime"};
    app.require_subcommand(1);

    BackendOverrides overrides;

    std::string script_path;
    std::vector<std::string> config_paths;
    bool parallel = false;
    std::string json_out;
    std::string transcript_dir;
    auto* run = app.add_subcommand("run-scenario", "Replay a script against several configs and compare");
    run->add_option("--script", script_path, "Script document")->required()->check(CLI::ExistingFile);
    run->add_option("--config", config_paths, "Agent config document (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_flag("--parallel", parallel, "Run configs concurrently");
    run->add_option("--out,--json", json_out, "Write the comparison report as JSON");
    run->add_option("--transcripts", transcript_dir, "Write one transcript per config into this directory");
    add_backend_options(run, overrides);

    std::string chat_config;
    auto* chat_cmd = app.add_subcommand("chat", "Interactive session on stdin");
    chat_cmd->add_option("--config", chat_config, "Agent config document")->required()->check(CLI::ExistingFile);
    add_backend_options(chat_cmd, overrides);

    std::string host = "127.0.0.1";
    int port = 8000;
    std::string data_dir;
    int snapshot_every = 8;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--port", port, "Port (0 picks a free one)");
    serve_cmd->add_option("--data,--data-dir", data_dir, "Directory for event logs and snapshots");
    serve_cmd->add_option("--snapshot-every", snapshot_every, "Events between snapshots")
        ->check(CLI::PositiveNumber);

    std::vector<std::string> validate_paths;
    std::vector<std::string> validate_configs;
    std::vector<std::string> validate_scripts;
    std::vector<std::string> validate_spaces;
    auto* validate_cmd = app.add_subcommand("validate", "Check config, script and space documents");
    validate_cmd->add_option("files", validate_paths, "Documents to check; the kind is inferred");
    validate_cmd->add_option("--config", validate_configs, "Agent config document");
    validate_cmd->add_option("--script", validate_scripts, "Script document");
    validate_cmd->add_option("--space", validate_spaces, "Action space document");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_scenario(script_path, config_paths, overrides, parallel, json_out, transcript_dir);
        if (*chat_cmd) return chat(chat_config, overrides);
        if (*serve_cmd) return serve(host, port, data_dir, snapshot_every);
        if (*validate_cmd) {
            std::vector<std::pair<std::string, DocKind>> docs;
            for (const auto& p : validate_paths) docs.emplace_back(p, DocKind::Infer);
            for (const auto& p : validate_configs) docs.emplace_back(p, DocKind::Config);
            for (const auto& p : validate_scripts) docs.emplace_back(p, DocKind::Script);
            for (const auto& p : validate_spaces) docs.emplace_back(p, DocKind::Space);
            if (docs.empty()) throw robochar::PreconditionError("nothing to validate");
            return validate(docs);
        }
    } catch (const robochar::ValidationError& e) {
        fmt::print(stderr, "error: field {}: {}\n", e.field(), e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 0;
}
