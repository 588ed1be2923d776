#include "robochar/action_space.hpp"
#include "robochar/appraisal.hpp"
#include "robochar/engine.hpp"
#include "robochar/errors.hpp"
#include "robochar/memory.hpp"
#include "robochar/persona.hpp"
#include "robochar/scenario.hpp"
#include "robochar/serialize.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using nlohmann::json;
using namespace robochar;

namespace {

// Python objects cross the boundary as JSON documents.
json to_json_value(const py::handle& obj) {
    if (py::isinstance<py::str>(obj)) return parse_document(obj.cast<std::string>());
    const auto dumps = py::module_::import("json").attr("dumps");
    return parse_document(dumps(obj).cast<std::string>());
}

py::object to_python(const json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(robochar, m) {
    m.doc() = "Robot character runtime: persona, memory, appraisal, emotion and action selection.";

    // Translators run newest first, so bases are registered before subclasses.
    auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<PreconditionError>(m, "PreconditionError", error);
    auto& parse = py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", parse);
    py::register_exception<BackendError>(m, "BackendError", error);
    py::register_exception<OrderViolation>(m, "OrderViolation", error);
    py::register_exception<UnknownSpace>(m, "UnknownSpace", error);

    m.def(
        "random_profile", [](std::uint64_t seed) { return to_python(profile_to_json(random_profile(seed))); },
        py::arg("seed"), "Profile with each trait drawn uniformly from the five levels.");

    m.def(
        "persona_text",
        [](const py::object& profile) { return render_persona_text(profile_from_json(to_json_value(profile), "profile")); },
        py::arg("profile"), "Canonical persona block for a profile document.");

    m.def(
        "parse_config", [](const py::object& doc) { return to_python(config_to_json(config_from_json(to_json_value(doc)))); },
        py::arg("config"), "Validates an agent config and returns its normalized form.");

    m.def(
        "replay",
        [](const py::object& config, const py::object& script) {
            const AgentConfig c = config_from_json(to_json_value(config));
            const Script s = parse_script(to_json_value(script).dump());
            Transcript t;
            {
                py::gil_scoped_release release;
                t = replay(c, s.inputs());
            }
            return to_python(transcript_to_json(t));
        },
        py::arg("config"), py::arg("script"), "Replays a script against one config and returns the transcript.");

    m.def(
        "replay_text",
        [](const py::object& config, const py::object& script) {
            const AgentConfig c = config_from_json(to_json_value(config));
            const Script s = parse_script(to_json_value(script).dump());
            py::gil_scoped_release release;
            return dump_document(transcript_to_json(replay(c, s.inputs())));
        },
        py::arg("config"), py::arg("script"), "Replay serialized in the canonical transcript file format.");

    m.def(
        "run_matrix",
        [](const py::object& script, const py::list& configs, bool parallel) {
            const Script s = parse_script(to_json_value(script).dump());
            std::vector<AgentConfig> cs;
            for (const auto& c : configs) cs.push_back(config_from_json(to_json_value(c)));
            ComparisonReport r;
            {
                py::gil_scoped_release release;
                r = run_matrix(s, cs, SpaceRegistry::builtin(), parallel);
            }
            return to_python(report_to_json(r));
        },
        py::arg("script"), py::arg("configs"), py::arg("parallel") = false,
        "Replays a script once per config and reports per-turn divergence.");

    m.def(
        "derive_emotion",
        [](const py::object& appraisal, const py::object& profile, bool emotion_enabled) {
            const auto a = to_json_value(appraisal).get<AppraisalRecord>();
            const auto p = profile_from_json(to_json_value(profile), "profile");
            return to_python(json(derive_emotion(a, p, EmotionState::neutral(), emotion_enabled)));
        },
        py::arg("appraisal"), py::arg("profile"), py::arg("emotion_enabled") = true);

    m.def(
        "score_importance", [](const py::object& episode) { return score_importance(to_json_value(episode).get<EpisodicRecord>()); },
        py::arg("episode"));

    m.def(
        "retrieve",
        [](const py::object& store, const std::string& context, int day, std::int64_t now, int top_k) {
            const MemoryStore s = store_from_json(to_json_value(store));
            return to_python(json(retrieve(s, RetrievalQuery{context, day, now, top_k})));
        },
        py::arg("store"), py::arg("context"), py::arg("day"), py::arg("now"), py::arg("top_k") = 5,
        "Top-k memories from a serialized store, best first.");

    m.def(
        "validate_selection",
        [](const py::object& selection) {
            const auto s = to_json_value(selection).get<ActionSelection>();
            return to_python(json(validate_selection(s, default_kitchen_space())));
        },
        py::arg("selection"), "Violations of a selection against the built-in kitchen space.");
}
