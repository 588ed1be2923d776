#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace robochar::text {

// Lowercases ASCII and folds typographic quotes/apostrophes/ellipses to ASCII.
std::string normalize(std::string_view raw);

// Lowercase word tokens ([a-z0-9'] runs) of the normalized text.
std::vector<std::string> words(std::string_view raw);

// Word tokens minus stopwords and possessive suffixes.
std::set<std::string> content_words(std::string_view raw);

std::string trim(std::string_view s);

// Case-insensitive substring test on normalized text.
bool contains(std::string_view haystack, std::string_view needle);

std::uint64_t fnv1a64(std::string_view bytes);

// 16 lowercase hex digits of fnv1a64.
std::string digest(std::string_view bytes);

std::string fixed(double value, int decimals = 2);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace robochar::text
