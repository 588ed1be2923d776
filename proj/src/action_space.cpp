#include "robochar/action_space.hpp"

#include "robochar/errors.hpp"
#include "robochar/serialize.hpp"
#include "robochar/text.hpp"
#include "shipped_data.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace robochar {

std::string_view param_kind_name(ParamKind kind) {
    switch (kind) {
        case ParamKind::Object: return "object";
        case ParamKind::Motion: return "motion";
        case ParamKind::Drink: return "drink";
        case ParamKind::FreeText: return "free_text";
    }
    return "object";
}

std::optional<ParamKind> parse_param_kind(std::string_view text) {
    for (auto k : {ParamKind::Object, ParamKind::Motion, ParamKind::Drink, ParamKind::FreeText}) {
        if (param_kind_name(k) == text) return k;
    }
    return std::nullopt;
}

std::string_view violation_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::UnknownAction: return "unknown_action";
        case ViolationKind::UnboundParameter: return "unbound_parameter";
        case ViolationKind::UnknownParameter: return "unknown_parameter";
        case ViolationKind::UnknownObject: return "unknown_object";
        case ViolationKind::EmptyValue: return "empty_value";
        case ViolationKind::MissingRequiredObject: return "missing_required_object";
    }
    return "unknown_action";
}

ActionSpace::ActionSpace(std::string id, std::vector<ActionSpec> actions, std::vector<std::string> inventory)
    : id_(std::move(id)), actions_(std::move(actions)), inventory_(std::move(inventory)) {
    if (id_.empty()) throw ValidationError("id", "action space id is empty");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < actions_.size(); ++i) {
        const auto& a = actions_[i];
        const std::string where = "actions[" + std::to_string(i) + "]";
        if (a.id.empty()) throw ValidationError(where + ".id", "empty action id");
        if (!ids.insert(a.id).second) throw ValidationError(where + ".id", "duplicate action id '" + a.id + "'");
        std::set<std::string> names;
        for (const auto& p : a.parameters) {
            if (p.name.empty() || !names.insert(p.name).second) {
                throw ValidationError(where + ".parameters", "parameter names must be unique and non-empty");
            }
        }
    }
    const ActionSpec* fallback = find(kSpeakOnly);
    if (!fallback || !fallback->parameters.empty()) {
        throw ValidationError("actions", "space must declare speak_only with no parameters");
    }
}

const ActionSpec* ActionSpace::find(std::string_view action_id) const {
    const auto it = std::find_if(actions_.begin(), actions_.end(),
                                 [&](const ActionSpec& a) { return a.id == action_id; });
    return it == actions_.end() ? nullptr : &*it;
}

bool ActionSpace::has_object(std::string_view object) const {
    return std::find(inventory_.begin(), inventory_.end(), object) != inventory_.end();
}

std::vector<Violation> validate_selection(const ActionSelection& selection, const ActionSpace& space) {
    std::vector<Violation> out;
    const ActionSpec* spec = space.find(selection.action_id);
    if (!spec) {
        out.push_back({ViolationKind::UnknownAction, selection.action_id,
                       "action '" + selection.action_id + "' is not in space '" + space.id() + "'"});
        return out;
    }
    for (const auto& param : spec->parameters) {
        const auto it = selection.bindings.find(param.name);
        if (it == selection.bindings.end()) {
            out.push_back({ViolationKind::UnboundParameter, param.name,
                           "parameter '" + param.name + "' of " + spec->id + " is not bound"});
            continue;
        }
        if (text::trim(it->second).empty()) {
            out.push_back({ViolationKind::EmptyValue, param.name, "parameter '" + param.name + "' is empty"});
            continue;
        }
        if ((param.kind == ParamKind::Object || param.kind == ParamKind::Drink) &&
            !space.has_object(it->second)) {
            out.push_back({ViolationKind::UnknownObject, it->second,
                           "'" + it->second + "' is not in the inventory"});
        }
    }
    for (const auto& [name, value] : selection.bindings) {
        const bool declared = std::any_of(spec->parameters.begin(), spec->parameters.end(),
                                          [&](const ActionParameter& p) { return p.name == name; });
        if (!declared) {
            out.push_back({ViolationKind::UnknownParameter, name,
                           spec->id + " has no parameter '" + name + "'"});
        }
    }
    for (const auto& object : spec->requires_objects) {
        if (!space.has_object(object)) {
            out.push_back({ViolationKind::MissingRequiredObject, object,
                           spec->id + " requires '" + object + "' in the inventory"});
        }
    }
    return out;
}

const ActionSpace& default_kitchen_space() {
    static const ActionSpace space = space_from_json(parse_document(shipped::kitchen_space_json()));
    return space;
}

std::string render_space_text(const ActionSpace& space) {
    std::ostringstream out;
    out << "Action space (" << space.id() << "):\n";
    for (const auto& a : space.actions()) {
        out << "- " << a.id << '(';
        for (std::size_t i = 0; i < a.parameters.size(); ++i) {
            if (i) out << ", ";
            out << a.parameters[i].name << ": " << param_kind_name(a.parameters[i].kind);
        }
        out << "): " << a.description << '\n';
    }
    out << "Inventory: " << text::join(space.inventory(), ", ");
    return out.str();
}

std::vector<std::string> parse_space_action_ids(std::string_view space_text) {
    std::vector<std::string> ids;
    std::istringstream in{std::string(space_text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.starts_with("- ")) continue;
        const auto paren = line.find('(');
        if (paren == std::string::npos || paren <= 2) continue;
        ids.push_back(line.substr(2, paren - 2));
    }
    return ids;
}

}  // namespace robochar
