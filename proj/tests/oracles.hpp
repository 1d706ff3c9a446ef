// Test-only reference implementations, deliberately brute-force and
// independent of the library's data structures.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sloganaudit/lexicon.hpp"

namespace oracles {

struct OracleHit {
    std::string category_id;
    std::string phrase;
    std::size_t start = 0;
    std::size_t len = 0;

    bool operator==(const OracleHit&) const = default;
};

// Longest-match/advance policy by exhaustive enumeration: at every position
// try every phrase of the category by direct token comparison.
inline std::vector<OracleHit> match(const std::vector<std::string>& tokens,
                                    const sloganaudit::Lexicon& lexicon) {
    std::vector<OracleHit> hits;
    for (const auto& cat : lexicon.categories()) {
        std::size_t pos = 0;
        while (pos < tokens.size()) {
            std::size_t best_len = 0;
            std::string best_phrase;
            for (std::size_t p = 0; p < cat.tokens.size(); ++p) {
                const auto& phrase = cat.tokens[p];
                if (phrase.size() > tokens.size() - pos || phrase.size() <= best_len) continue;
                bool ok = true;
                for (std::size_t k = 0; k < phrase.size(); ++k) {
                    if (tokens[pos + k] != phrase[k]) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    best_len = phrase.size();
                    best_phrase = cat.phrases[p];
                }
            }
            if (best_len > 0) {
                hits.push_back({cat.info.id, best_phrase, pos, best_len});
                pos += best_len;
            } else {
                ++pos;
            }
        }
    }
    return hits;
}

// O(n^2) KS statistic: evaluate |F_a - F_b| at every pooled sample value.
inline double ks_d(const std::vector<double>& a, const std::vector<double>& b) {
    auto F = [](const std::vector<double>& s, double x) {
        std::size_t n = 0;
        for (double v : s) {
            if (v <= x) ++n;
        }
        return static_cast<double>(n) / static_cast<double>(s.size());
    };
    double d = 0.0;
    for (double x : a) d = std::max(d, std::abs(F(a, x) - F(b, x)));
    for (double x : b) d = std::max(d, std::abs(F(a, x) - F(b, x)));
    return d;
}

// Relative-bias shares computed straight from raw counts: normalize by the
// dictionary size, then divide by the summed normalized counts.
inline std::map<std::string, double> bias_shares(const std::map<std::string, std::int64_t>& raw,
                                                 int dict_size) {
    std::map<std::string, double> norms;
    double total = 0.0;
    for (const auto& [gid, count] : raw) {
        norms[gid] = static_cast<double>(count) / static_cast<double>(dict_size);
        total += norms[gid];
    }
    std::map<std::string, double> shares;
    for (const auto& [gid, norm] : norms) shares[gid] = total == 0.0 ? 0.0 : norm / total;
    return shares;
}

} // namespace oracles
