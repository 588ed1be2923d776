#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace robochar::llm {

struct LexiconScore {
    double sum = 0.0;
    int matches = 0;

    // sum / max(1, matches)
    double valence() const { return matches > 0 ? sum / matches : 0.0; }
    LexiconScore& operator+=(const LexiconScore& other) {
        sum += other.sum;
        matches += other.matches;
        return *this;
    }
};

// Phrase-weight sentiment table. Phrases are matched over word tokens,
// longest phrase first, without overlaps.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::map<std::string, double> entries, std::string version = {});

    // Parses the shipped document format; throws ParseError.
    static Lexicon from_json(std::string_view document);
    // The lexicon compiled into the library from data/lexicon.json.
    static const Lexicon& shipped();

    LexiconScore score(std::string_view text) const;
    double valence(std::string_view text) const { return score(text).valence(); }

    const std::string& version() const noexcept { return version_; }
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::map<std::string, double> entries_;
    std::map<std::vector<std::string>, double> phrases_;
    std::size_t longest_ = 1;
    std::string version_;
};

// Valence of `text` under the shipped lexicon.
double lexicon_valence(std::string_view text);

}  // namespace robochar::llm
