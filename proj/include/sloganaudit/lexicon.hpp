#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sloganaudit/corpus.hpp"

namespace sloganaudit {

// Lowercases, maps every character that is not a letter, digit, or internal
// apostrophe to a single space, then splits on whitespace. "$" and "+" fall
// into the punctuation class. Bytes >= 0x80 pass through unchanged, so UTF-8
// words stay whole (no case folding outside ASCII).
std::vector<std::string> normalize_text(std::string_view text);

struct TermCategory {
    std::string id;            // e.g. "empowerment"
    std::string display_name;  // e.g. "Empowerment"

    bool operator==(const TermCategory&) const = default;
};

// The term dictionaries: per category an ordered list of normalized phrases
// of 1..5 tokens. Phrases may repeat across categories (Table-style shared
// words) but never within one.
class Lexicon {
public:
    struct Category {
        TermCategory info;
        std::vector<std::string> phrases;              // normalized, space-joined
        std::vector<std::vector<std::string>> tokens;  // tokenized phrases

        bool operator==(const Category&) const = default;
    };

    Lexicon() = default;

    // Normalizes every phrase and validates. Throws ValidationError on empty
    // or duplicate (post-normalization) phrases or phrases over 5 tokens.
    static Lexicon from_lists(
        const std::vector<std::pair<TermCategory, std::vector<std::string>>>& lists);

    const std::vector<Category>& categories() const { return categories_; }
    const Category* find(std::string_view category_id) const;
    std::vector<std::string> category_ids() const;

    // Number of dictionary entries (Eq. 1 denominator). Throws ConfigError
    // for unknown ids.
    int dict_size(std::string_view category_id) const;

    std::uint64_t digest() const;

    bool operator==(const Lexicon&) const = default;

private:
    std::vector<Category> categories_;
};

// The four embedded dictionaries (empowerment, financial, benefits_features,
// demographic_specific).
const Lexicon& default_lexicon();

// JSON object mapping category id -> array of phrase strings. Known category
// ids keep the canonical order; any others follow alphabetically.
Lexicon load_lexicon(const std::filesystem::path& path);
void save_lexicon(const Lexicon& lexicon, const std::filesystem::path& path);

struct TermHit {
    std::string group_id;         // empty for bare token-list matches
    std::int64_t slogan_index = -1;
    std::string category_id;
    std::string phrase;           // normalized dictionary phrase
    std::size_t token_start = 0;
    std::size_t token_count = 0;

    bool operator==(const TermHit&) const = default;
};

// Left-to-right longest-match scan, independently per category: at each
// position the longest matching phrase wins and the scan advances past it,
// so hits within a category never overlap. A token span may still score in
// several categories.
std::vector<TermHit> match_terms(const std::vector<std::string>& tokens,
                                 const Lexicon& lexicon);

// Raw hit totals and per-slogan hit vectors for every
// (taxonomy group x term category) cell.
struct CountsTable {
    std::vector<std::string> group_ids;     // taxonomy order
    std::vector<std::string> category_ids;  // lexicon order

    std::vector<std::vector<std::int64_t>> raw;             // [group][category]
    std::vector<std::vector<std::vector<int>>> per_slogan;  // [group][category][slogan]
    std::vector<std::int64_t> n_slogans;                    // [group]

    std::optional<std::size_t> group_index(std::string_view group_id) const;
    std::optional<std::size_t> category_index(std::string_view category_id) const;

    std::int64_t raw_count(std::string_view group_id, std::string_view category_id) const;
    const std::vector<int>& slogan_counts(std::string_view group_id,
                                          std::string_view category_id) const;

    // raw == sum(per_slogan) and vector lengths == n_slogans, every cell.
    void validate() const;

    bool operator==(const CountsTable&) const = default;
};

CountsTable count_corpus(const Corpus& corpus, const Lexicon& lexicon);

// Counts file: {"raw_count": {...}, "per_slogan": {...}} keyed by
// "group_id/category".
void save_counts(const CountsTable& counts, const std::filesystem::path& path);
CountsTable load_counts(const std::filesystem::path& path);

} // namespace sloganaudit
