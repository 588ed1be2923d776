#pragma once

// Path-aware field access for document parsing. Every failure is a
// ValidationError whose field is the dotted path of the offending value.

#include "robochar/errors.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace robochar::detail {

using nlohmann::json;

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

inline std::string index_path(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

inline void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path.empty() ? "$" : path, "expected an object");
}

template <typename T>
T as(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ValidationError(path, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ValidationError(path, "expected a string");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ValidationError(path, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ValidationError(path, "expected a number");
    }
    try {
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(path, e.what());
    }
}

template <typename T>
T required(const json& j, const std::string& base, const std::string& key) {
    const auto path = join_path(base, key);
    if (!j.contains(key)) throw ValidationError(path, "is required");
    return as<T>(j.at(key), path);
}

template <typename T>
T optional_or(const json& j, const std::string& base, const std::string& key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return as<T>(j.at(key), join_path(base, key));
}

inline std::vector<std::string> string_list(const json& j, const std::string& base, const std::string& key,
                                            bool is_required = false) {
    const auto path = join_path(base, key);
    if (!j.contains(key)) {
        if (is_required) throw ValidationError(path, "is required");
        return {};
    }
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw ValidationError(path, "expected an array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as<std::string>(arr[i], index_path(path, i)));
    return out;
}

inline void check_schema_version(const json& j, int expected) {
    require_object(j, "");
    const int v = required<int>(j, "", "schema_version");
    if (v != expected) {
        throw ValidationError("schema_version", "unsupported version " + std::to_string(v) + ", expected " +
                                                    std::to_string(expected));
    }
}

}  // namespace robochar::detail
