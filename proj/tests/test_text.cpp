#include "robochar/text.hpp"

#include <gtest/gtest.h>

using namespace robochar;

TEST(Text, NormalizeFoldsTypographicPunctuation) {
    EXPECT_EQ(text::normalize("It\xE2\x80\x99s OK\xE2\x80\xA6"), "it's ok...");
    EXPECT_EQ(text::normalize("\xE2\x80\x9CHi\xE2\x80\x9D"), "\"hi\"");
}

TEST(Text, WordsSplitOnPunctuationAndKeepApostrophes) {
    const std::vector<std::string> expected{"you", "won't", "believe", "this", "mike", "curved", "me"};
    EXPECT_EQ(text::words("You won't believe this, Mike curved me!"), expected);
    EXPECT_EQ(text::words("'quoted'"), std::vector<std::string>{"quoted"});
    EXPECT_TRUE(text::words("  ...  ").empty());
}

TEST(Text, ContentWordsDropStopwordsAndPossessives) {
    const auto w = text::content_words("Mike's review for the fluids final is too much");
    EXPECT_EQ(w, (std::set<std::string>{"mike", "review", "fluids", "final", "much"}));
}

TEST(Text, ContainsIsCaseInsensitive) {
    EXPECT_TRUE(text::contains("Looks CONCERNED", "concerned"));
    EXPECT_FALSE(text::contains("calm", "concerned"));
}

TEST(Text, Fnv1aKnownVectors) {
    // Published FNV-1a 64-bit test vectors.
    EXPECT_EQ(text::fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(text::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(text::fnv1a64("foobar"), 0x85944171f73967e8ULL);
    EXPECT_EQ(text::digest("a"), "af63dc4c8601ec8c");
}

TEST(Text, FixedNeverPrintsNegativeZero) {
    EXPECT_EQ(text::fixed(-0.001), "0.00");
    EXPECT_EQ(text::fixed(-0.456), "-0.46");
    EXPECT_EQ(text::fixed(0.5, 1), "0.5");
}

TEST(Text, TrimAndJoin) {
    EXPECT_EQ(text::trim("\t a b \n"), "a b");
    EXPECT_EQ(text::trim("   "), "");
    EXPECT_EQ(text::join({"a", "b", "c"}, ", "), "a, b, c");
    EXPECT_EQ(text::join({}, ", "), "");
}
