#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sloganaudit/lexicon.hpp"
#include "sloganaudit/taxonomy.hpp"

namespace sloganaudit {

// Which groups share the denominator when a normalized count is turned into
// a relative-bias share:
//   all          - every included group (baseline too, unless excluded)
//   per_category - groups of the same demographic category
//   targets_only - every non-baseline group
enum class DenominatorScope { all, per_category, targets_only };

DenominatorScope parse_scope(std::string_view s);  // throws ConfigError
std::string to_string(DenominatorScope scope);

struct BiasCell {
    std::string demographic_category;
    std::string group_id;
    std::string category_id;  // term category
    std::int64_t raw_count = 0;
    int dict_size = 0;
    double normalized_count = 0.0;
    double relative_bias = 0.0;      // in [0, 1]
    double relative_bias_pct = 0.0;  // 100 x relative_bias

    bool operator==(const BiasCell&) const = default;
};

struct BiasTable {
    std::vector<BiasCell> cells;  // taxonomy order x term-category order
    std::vector<std::string> included_groups;
    bool include_baseline = true;
    DenominatorScope scope = DenominatorScope::all;

    // (scope unit, term category) pairs where no terms were detected, so
    // every share in that unit is reported as 0 instead of dividing by zero.
    // The unit is "*" for whole-table scopes and the demographic category id
    // under per_category.
    std::vector<std::pair<std::string, std::string>> no_detections;

    const BiasCell* find(std::string_view group_id, std::string_view category_id) const;
    bool flagged(std::string_view unit, std::string_view category_id) const;

    bool operator==(const BiasTable&) const = default;
};

// Raw count over dictionary size. Throws ConfigError when dict_size < 1.
double normalized_count(std::int64_t raw, int dict_size);

// One group's share of the summed normalized counts. A zero denominator
// yields 0 for every group (callers flag the category as "no detections").
double relative_bias(const std::map<std::string, double>& norms, const std::string& group_id);

// Full table. Throws ValidationError when counts cover a group or category
// missing from the taxonomy/lexicon.
BiasTable bias_table(const CountsTable& counts, const Lexicon& lexicon,
                     const Taxonomy& taxonomy,
                     DenominatorScope scope = DenominatorScope::all,
                     bool include_baseline = true);

} // namespace sloganaudit
