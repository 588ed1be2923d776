#include "robochar/llm/lexicon.hpp"

#include "robochar/errors.hpp"
#include "robochar/text.hpp"
#include "shipped_data.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace robochar::llm {

Lexicon::Lexicon(std::map<std::string, double> entries, std::string version)
    : entries_(std::move(entries)), version_(std::move(version)) {
    for (const auto& [phrase, weight] : entries_) {
        if (!(weight >= -1.0 && weight <= 1.0)) {
            throw ParseError("lexicon weight for '" + phrase + "' outside [-1, 1]");
        }
        auto tokens = text::words(phrase);
        if (tokens.empty()) throw ParseError("lexicon phrase '" + phrase + "' has no words");
        longest_ = std::max(longest_, tokens.size());
        phrases_.emplace(std::move(tokens), weight);
    }
}

Lexicon Lexicon::from_json(std::string_view document) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("lexicon: ") + e.what());
    }
    if (!j.contains("entries") || !j["entries"].is_object()) {
        throw ParseError("lexicon: missing object 'entries'");
    }
    std::map<std::string, double> entries;
    for (const auto& [phrase, weight] : j["entries"].items()) {
        if (!weight.is_number()) throw ParseError("lexicon: weight for '" + phrase + "' is not a number");
        entries.emplace(phrase, weight.get<double>());
    }
    return Lexicon(std::move(entries), j.value("lexicon_version", std::string{}));
}

const Lexicon& Lexicon::shipped() {
    static const Lexicon instance = from_json(shipped::lexicon_json());
    return instance;
}

LexiconScore Lexicon::score(std::string_view input) const {
    const auto tokens = text::words(input);
    LexiconScore result;
    std::size_t i = 0;
    while (i < tokens.size()) {
        bool matched = false;
        const std::size_t max_len = std::min(longest_, tokens.size() - i);
        for (std::size_t len = max_len; len >= 1; --len) {
            std::vector<std::string> window(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                            tokens.begin() + static_cast<std::ptrdiff_t>(i + len));
            const auto it = phrases_.find(window);
            if (it != phrases_.end()) {
                result.sum += it->second;
                ++result.matches;
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched) ++i;
    }
    return result;
}

double lexicon_valence(std::string_view text) {
    return Lexicon::shipped().valence(text);
}

}  // namespace robochar::llm
