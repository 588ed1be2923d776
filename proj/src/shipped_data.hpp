#pragma once

#include <string_view>

// Data files under data/ compiled into the library at configure time.
namespace robochar::shipped {

std::string_view lexicon_json();
std::string_view mock_rules_json();
std::string_view kitchen_space_json();
std::string_view cues_json();

}  // namespace robochar::shipped
