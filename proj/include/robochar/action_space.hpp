#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace robochar {

enum class ParamKind { Object, Motion, Drink, FreeText };

std::string_view param_kind_name(ParamKind kind);
std::optional<ParamKind> parse_param_kind(std::string_view text);

struct ActionParameter {
    std::string name;
    ParamKind kind = ParamKind::Object;

    bool operator==(const ActionParameter&) const = default;
};

struct ActionSpec {
    std::string id;
    std::string name;
    std::string description;
    std::vector<ActionParameter> parameters;
    // Objects that must be in the space inventory for the action to be usable.
    std::vector<std::string> requires_objects;

    bool operator==(const ActionSpec&) const = default;
};

inline constexpr std::string_view kSpeakOnly = "speak_only";

class ActionSpace {
public:
    ActionSpace() = default;
    // Throws ValidationError on duplicate action ids, duplicate parameter
    // names, or a missing parameterless speak_only.
    ActionSpace(std::string id, std::vector<ActionSpec> actions, std::vector<std::string> inventory);

    const std::string& id() const noexcept { return id_; }
    const std::vector<ActionSpec>& actions() const noexcept { return actions_; }
    const std::vector<std::string>& inventory() const noexcept { return inventory_; }

    const ActionSpec* find(std::string_view action_id) const;
    bool has_object(std::string_view object) const;

    bool operator==(const ActionSpace&) const = default;

private:
    std::string id_;
    std::vector<ActionSpec> actions_;
    std::vector<std::string> inventory_;
};

struct ActionSelection {
    std::string action_id{kSpeakOnly};
    std::map<std::string, std::string> bindings;
    std::string utterance;
    std::string rationale;

    bool operator==(const ActionSelection&) const = default;
};

enum class ViolationKind {
    UnknownAction,
    UnboundParameter,
    UnknownParameter,
    UnknownObject,
    EmptyValue,
    MissingRequiredObject
};

std::string_view violation_name(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string subject;  // action id, parameter name or object token
    std::string message;

    bool operator==(const Violation&) const = default;
};

// Every violated invariant, in a stable order. Empty means valid.
std::vector<Violation> validate_selection(const ActionSelection& selection, const ActionSpace& space);

// The kitchen-assistant space: brew_drink, fetch_ingredient, pick_place,
// perform_motion and speak_only over the shipped inventory.
const ActionSpace& default_kitchen_space();

// Prompt rendering of the space: one line per action, then the inventory.
std::string render_space_text(const ActionSpace& space);

// Action ids declared in a rendered space text.
std::vector<std::string> parse_space_action_ids(std::string_view space_text);

}  // namespace robochar
