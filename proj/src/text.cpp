#include "robochar/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>

namespace robochar::text {

namespace {

constexpr std::array kStopwords = {
    "a",     "about", "all",   "also", "am",   "an",    "and",   "any",   "are",  "as",
    "at",    "be",    "been",  "but",  "by",   "can",   "could", "did",   "do",   "does",
    "for",   "from",  "had",   "has",  "have", "he",    "her",   "him",   "his",  "how",
    "i",     "i'll",  "i'm",   "if",   "in",   "into",  "is",    "it",    "it's", "its",
    "just",  "me",    "my",    "no",   "not",  "of",    "oh",    "ok",    "on",   "or",
    "our",   "she",   "so",    "such", "that", "the",   "their", "them",  "then", "there",
    "these", "they",  "this",  "to",   "too",  "up",    "us",    "very",  "was",  "we",
    "were",  "what",  "when",  "which", "who", "why",   "will",  "with",  "won't", "would",
    "you",   "your",  "you're"};

bool is_stopword(std::string_view w) {
    return std::find(kStopwords.begin(), kStopwords.end(), w) != kStopwords.end();
}

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'';
}

}  // namespace

std::string normalize(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto c = static_cast<unsigned char>(raw[i]);
        // U+2018/U+2019 (E2 80 98/99), U+201C/U+201D (E2 80 9C/9D), U+2026 (E2 80 A6)
        if (c == 0xE2 && i + 2 < raw.size() && static_cast<unsigned char>(raw[i + 1]) == 0x80) {
            const auto tail = static_cast<unsigned char>(raw[i + 2]);
            if (tail == 0x98 || tail == 0x99) {
                out.push_back('\'');
                i += 2;
                continue;
            }
            if (tail == 0x9C || tail == 0x9D) {
                out.push_back('"');
                i += 2;
                continue;
            }
            if (tail == 0xA6) {
                out += "...";
                i += 2;
                continue;
            }
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::vector<std::string> words(std::string_view raw) {
    const std::string norm = normalize(raw);
    std::vector<std::string> out;
    std::string current;
    for (char c : norm) {
        if (is_word_char(c)) {
            current.push_back(c);
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    // Quotes used as punctuation leave stray apostrophes at word edges.
    for (auto& w : out) {
        while (!w.empty() && w.front() == '\'') w.erase(w.begin());
        while (!w.empty() && w.back() == '\'') w.pop_back();
    }
    std::erase_if(out, [](const std::string& w) { return w.empty(); });
    return out;
}

std::set<std::string> content_words(std::string_view raw) {
    std::set<std::string> out;
    for (auto w : words(raw)) {
        if (is_stopword(w)) continue;
        if (w.size() > 2 && w.ends_with("'s")) w.resize(w.size() - 2);
        if (w.size() < 2) continue;
        out.insert(std::move(w));
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

bool contains(std::string_view haystack, std::string_view needle) {
    return normalize(haystack).find(normalize(needle)) != std::string::npos;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string digest(std::string_view bytes) {
    return fmt::format("{:016x}", fnv1a64(bytes));
}

std::string fixed(double value, int decimals) {
    std::string s = fmt::format("{:.{}f}", value, decimals);
    // Avoid "-0.00" so renderings do not depend on the sign of a rounded zero.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace robochar::text
