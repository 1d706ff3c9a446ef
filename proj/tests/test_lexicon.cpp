#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <random>
#include <set>

#include "oracles.hpp"
#include "sloganaudit/errors.hpp"
#include "sloganaudit/lexicon.hpp"

using namespace sloganaudit;

namespace {

std::vector<TermHit> hits_for(std::string_view text, const std::string& category = "") {
    auto all = match_terms(normalize_text(text), default_lexicon());
    if (category.empty()) return all;
    std::vector<TermHit> out;
    for (auto& h : all) {
        if (h.category_id == category) out.push_back(h);
    }
    return out;
}

} // namespace

TEST_CASE("normalize_text applies the stated character classes") {
    CHECK(normalize_text("Save Smarter, Achieve More!") ==
          std::vector<std::string>{"save", "smarter", "achieve", "more"});
    CHECK(normalize_text("") == std::vector<std::string>{});
    CHECK(normalize_text("high-yield 24/7 APY") ==
          std::vector<std::string>{"high", "yield", "24", "7", "apy"});
    CHECK(normalize_text("$100,000+ a year") ==
          std::vector<std::string>{"100", "000", "a", "year"});
    CHECK(normalize_text("bachelor's degree") ==
          std::vector<std::string>{"bachelor's", "degree"});
    // only internal apostrophes survive
    CHECK(normalize_text("'quoted'") == std::vector<std::string>{"quoted"});
    CHECK(normalize_text("  \t\n ") == std::vector<std::string>{});
}

TEST_CASE("default lexicon has the documented shape") {
    const Lexicon& lex = default_lexicon();
    CHECK(lex.categories().size() == 4);
    CHECK(lex.category_ids() ==
          std::vector<std::string>{"empowerment", "financial", "benefits_features",
                                   "demographic_specific"});
    CHECK(lex.dict_size("empowerment") == 34);
    CHECK(lex.dict_size("financial") == 31);
    CHECK(lex.dict_size("benefits_features") == 36);
    CHECK(lex.dict_size("demographic_specific") == 51);

    for (const auto& cat : lex.categories()) {
        std::set<std::string> seen;
        for (std::size_t i = 0; i < cat.phrases.size(); ++i) {
            CHECK(seen.insert(cat.phrases[i]).second);
            CHECK(cat.tokens[i].size() >= 1);
            CHECK(cat.tokens[i].size() <= 5);
        }
    }
}

TEST_CASE("shared phrases appear across categories by design") {
    const Lexicon& lex = default_lexicon();
    auto contains = [&](const char* cat, const char* phrase) {
        const auto* c = lex.find(cat);
        REQUIRE(c != nullptr);
        return std::find(c->phrases.begin(), c->phrases.end(), phrase) != c->phrases.end();
    };
    CHECK(contains("empowerment", "support"));
    CHECK(contains("benefits_features", "support"));
    CHECK(contains("demographic_specific", "tailored"));
    CHECK(contains("benefits_features", "tailored"));
    CHECK(contains("empowerment", "growth"));
    CHECK(contains("demographic_specific", "growth"));
}

TEST_CASE("match_terms finds dictionary members per category") {
    auto hits = hits_for("Empower your savings");
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].category_id == "empowerment");
    CHECK(hits[0].phrase == "empower");
    CHECK(hits[1].category_id == "financial");
    CHECK(hits[1].phrase == "savings");
}

TEST_CASE("longest match wins and consumes its span") {
    auto fin = hits_for("competitive interest rate", "financial");
    REQUIRE(fin.size() == 1);
    CHECK(fin[0].phrase == "competitive interest rate");
    CHECK(fin[0].token_start == 0);
    CHECK(fin[0].token_count == 3);
}

TEST_CASE("a span can score in several categories independently") {
    auto benefits = hits_for("dedicated support", "benefits_features");
    auto empower = hits_for("dedicated support", "empowerment");
    REQUIRE(benefits.size() == 1);
    CHECK(benefits[0].phrase == "dedicated support");
    REQUIRE(empower.size() == 1);
    CHECK(empower[0].phrase == "support");
}

TEST_CASE("distinct inflections are distinct entries") {
    auto hits = hits_for("empowered and empowering", "empowerment");
    CHECK(hits.size() == 2);
}

TEST_CASE("hyphenated dictionary entries match both spellings") {
    CHECK(hits_for("high-yield savings", "financial").size() == 1);
    CHECK(hits_for("high yield savings", "financial").size() == 1);
    CHECK(hits_for("high-yield savings", "financial")[0].phrase == "high yield savings");
}

TEST_CASE("whole-token matching only") {
    CHECK(hits_for("headstrong", "empowerment").empty());
    CHECK(hits_for("strong", "empowerment").size() == 1);
}

TEST_CASE("within-category duplicates are rejected, cross-category allowed") {
    CHECK_THROWS_AS(Lexicon::from_lists({{{"a", "A"}, {"support", "Support"}}}),
                    ValidationError);
    CHECK_NOTHROW(Lexicon::from_lists(
        {{{"a", "A"}, {"support"}}, {{"b", "B"}, {"support"}}}));
    CHECK_THROWS_AS(Lexicon::from_lists({{{"a", "A"}, {"x", "!!"}}}), ValidationError);
    CHECK_THROWS_AS(
        Lexicon::from_lists({{{"a", "A"}, {"one two three four five six"}}}),
        ValidationError);
}

TEST_CASE("matcher agrees with the exhaustive oracle on random token lists") {
    // alphabet mixes dictionary tokens and neutral fillers
    const std::vector<std::string> alphabet = {
        "competitive", "interest", "rate",   "savings", "support", "dedicated", "empower",
        "high",        "yield",   "growth", "tailored", "unique", "custom",    "fit",
        "personal",    "touch",   "blue",   "door",    "cloud",  "stone"};
    std::mt19937_64 rng(99);
    const Lexicon& lex = default_lexicon();
    for (int trial = 0; trial < 4000; ++trial) {
        const std::size_t len = rng() % 13;
        std::vector<std::string> tokens;
        for (std::size_t i = 0; i < len; ++i) tokens.push_back(alphabet[rng() % alphabet.size()]);

        const auto got = match_terms(tokens, lex);
        const auto want = oracles::match(tokens, lex);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].category_id == want[i].category_id);
            CHECK(got[i].phrase == want[i].phrase);
            CHECK(got[i].token_start == want[i].start);
            CHECK(got[i].token_count == want[i].len);
        }
    }
}

TEST_CASE("hits never overlap within a category") {
    const std::vector<std::string> alphabet = {
        "competitive", "interest", "rate", "savings", "support", "dedicated",
        "personal",    "loans",    "low",  "fees",    "blue",    "sky"};
    std::mt19937_64 rng(7);
    const Lexicon& lex = default_lexicon();
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<std::string> tokens;
        const std::size_t len = rng() % 16;
        for (std::size_t i = 0; i < len; ++i) tokens.push_back(alphabet[rng() % alphabet.size()]);
        auto hits = match_terms(tokens, lex);
        for (const auto& cid : lex.category_ids()) {
            std::vector<std::pair<std::size_t, std::size_t>> spans;
            for (const auto& h : hits) {
                if (h.category_id == cid) spans.emplace_back(h.token_start, h.token_count);
            }
            for (std::size_t i = 1; i < spans.size(); ++i) {
                CHECK(spans[i - 1].first + spans[i - 1].second <= spans[i].first);
            }
        }
    }
}

TEST_CASE("appending a phrase after a separator adds exactly one hit") {
    const Lexicon& lex = default_lexicon();
    std::vector<std::string> base = normalize_text("brighter days under a blue sky");
    for (const auto& cat : lex.categories()) {
        for (const auto& phrase_tokens :
             {cat.tokens.front(), cat.tokens[cat.tokens.size() / 2], cat.tokens.back()}) {
            auto before = 0, after = 0;
            for (const auto& h : match_terms(base, lex)) {
                if (h.category_id == cat.info.id) ++before;
            }
            auto extended = base;
            extended.push_back("zzseparator");
            extended.insert(extended.end(), phrase_tokens.begin(), phrase_tokens.end());
            for (const auto& h : match_terms(extended, lex)) {
                if (h.category_id == cat.info.id) ++after;
            }
            CHECK(after == before + 1);
        }
    }
}

TEST_CASE("count_corpus aggregates per slogan and in total") {
    const Taxonomy t = default_taxonomy();
    auto slogan = [](std::string g, int i, std::string text) {
        return Slogan{g, i, "p", std::move(text), "m", "2024-05-01T12:00:00Z"};
    };
    Corpus corpus(t, {
                         slogan("male", 0, "Empower your savings"),
                         slogan("male", 1, "Dedicated support for you"),
                         slogan("female", 0, "Blue sky thinking"),
                     });
    const CountsTable counts = count_corpus(corpus, default_lexicon());
    counts.validate();

    CHECK(counts.raw_count("male", "empowerment") == 2);  // empower + support
    CHECK(counts.raw_count("male", "financial") == 1);
    CHECK(counts.raw_count("male", "benefits_features") == 1);
    CHECK(counts.slogan_counts("male", "empowerment") == std::vector<int>{1, 1});
    CHECK(counts.raw_count("female", "empowerment") == 0);
    CHECK(counts.slogan_counts("female", "financial") == std::vector<int>{0});
    // groups without slogans still appear with empty vectors
    CHECK(counts.slogan_counts("phd", "financial").empty());
    CHECK(counts.n_slogans[*counts.group_index("phd")] == 0);
}

TEST_CASE("count_corpus of an empty corpus is all-empty") {
    Corpus corpus(default_taxonomy(), {});
    const CountsTable counts = count_corpus(corpus, default_lexicon());
    counts.validate();
    for (const auto& row : counts.raw) {
        for (auto v : row) CHECK(v == 0);
    }
}

TEST_CASE("counts table save/load round trip") {
    const Taxonomy t = default_taxonomy();
    Corpus corpus(t, {Slogan{"male", 0, "p", "Empower your savings", "m",
                             "2024-05-01T12:00:00Z"}});
    const CountsTable counts = count_corpus(corpus, default_lexicon());

    auto dir = std::filesystem::temp_directory_path() /
               ("sloganaudit_counts_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    save_counts(counts, dir / "counts.json");
    const CountsTable loaded = load_counts(dir / "counts.json");
    CHECK(loaded == counts);
}

TEST_CASE("lexicon file round trip keeps canonical order") {
    auto dir = std::filesystem::temp_directory_path() /
               ("sloganaudit_lex_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    save_lexicon(default_lexicon(), dir / "lex.json");
    const Lexicon loaded = load_lexicon(dir / "lex.json");
    CHECK(loaded == default_lexicon());
}
