#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sloganaudit/taxonomy.hpp"

namespace sloganaudit {

struct Slogan {
    std::string group_id;
    std::int64_t index = 0;  // 0-based within the group
    std::string prompt;
    std::string text;
    std::string model;
    std::string created_at;  // ISO-8601 UTC, seconds: "2024-05-01T12:00:00Z"

    bool operator==(const Slogan&) const = default;
};

// Immutable, validated slogan collection. Iteration order is always
// (group_id, index) ascending, so downstream output is deterministic.
class Corpus {
public:
    Corpus() = default;

    // Sorts and validates. Throws ValidationError on duplicate
    // (group_id, index), unknown group ids, or empty slogan text.
    Corpus(Taxonomy taxonomy, std::vector<Slogan> slogans);

    const Taxonomy& taxonomy() const { return taxonomy_; }
    const std::vector<Slogan>& slogans() const { return slogans_; }
    std::size_t size() const { return slogans_.size(); }
    bool empty() const { return slogans_.empty(); }

    // Slogans of one group, index order.
    std::vector<const Slogan*> group(const std::string& group_id) const;

    // Digest over the taxonomy and every record minus created_at, so
    // regenerating with the same seed/model at another time matches.
    std::uint64_t digest() const;
    std::string digest_hex() const;

    bool operator==(const Corpus&) const = default;

private:
    Taxonomy taxonomy_;
    std::vector<Slogan> slogans_;
};

// JSON Lines, UTF-8, LF; one object per line with keys exactly
// (group_id, index, prompt, text, model, created_at) in that order.
Corpus load_corpus(const std::filesystem::path& path, const Taxonomy& taxonomy);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// One corpus line, without the trailing newline.
std::string slogan_to_jsonl(const Slogan& s);

// Current UTC time in the corpus timestamp format.
std::string utc_timestamp_now();

// Shape check for "YYYY-MM-DDThh:mm:ssZ".
bool is_valid_timestamp(const std::string& ts);

} // namespace sloganaudit
