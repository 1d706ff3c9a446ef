#include "sloganaudit/bias.hpp"

#include <algorithm>

#include "sloganaudit/errors.hpp"

namespace sloganaudit {

DenominatorScope parse_scope(std::string_view s) {
    if (s == "all") return DenominatorScope::all;
    if (s == "per_category") return DenominatorScope::per_category;
    if (s == "targets_only") return DenominatorScope::targets_only;
    throw ConfigError("unknown denominator scope '" + std::string(s) +
                      "' (expected all | per_category | targets_only)");
}

std::string to_string(DenominatorScope scope) {
    switch (scope) {
        case DenominatorScope::all: return "all";
        case DenominatorScope::per_category: return "per_category";
        case DenominatorScope::targets_only: return "targets_only";
    }
    return "all";
}

const BiasCell* BiasTable::find(std::string_view group_id, std::string_view category_id) const {
    for (const auto& cell : cells) {
        if (cell.group_id == group_id && cell.category_id == category_id) return &cell;
    }
    return nullptr;
}

bool BiasTable::flagged(std::string_view unit, std::string_view category_id) const {
    return std::any_of(no_detections.begin(), no_detections.end(), [&](const auto& p) {
        return p.first == unit && p.second == category_id;
    });
}

double normalized_count(std::int64_t raw, int dict_size) {
    if (dict_size < 1) throw ConfigError("empty dictionary: dict_size must be >= 1");
    if (raw < 0) throw ConfigError("raw count must be non-negative");
    return static_cast<double>(raw) / static_cast<double>(dict_size);
}

double relative_bias(const std::map<std::string, double>& norms, const std::string& group_id) {
    auto it = norms.find(group_id);
    if (it == norms.end())
        throw AnalysisError("group '" + group_id + "' not present in normalized counts");
    double total = 0.0;
    for (const auto& [_, v] : norms) total += v;
    if (total == 0.0) return 0.0;  // callers flag the category as "no detections"
    return it->second / total;
}

BiasTable bias_table(const CountsTable& counts, const Lexicon& lexicon,
                     const Taxonomy& taxonomy, DenominatorScope scope, bool include_baseline) {
    counts.validate();
    for (const auto& gid : counts.group_ids) {
        if (!taxonomy.find_group(gid))
            throw ValidationError("counts table group '" + gid + "' not in taxonomy");
    }
    for (const auto& cid : counts.category_ids) {
        if (!lexicon.find(cid))
            throw ValidationError("counts table category '" + cid + "' not in lexicon");
    }

    const std::string baseline_id = taxonomy.baseline().id;
    const bool baseline_in = include_baseline && scope != DenominatorScope::targets_only;

    // Included groups in taxonomy order, restricted to those present in counts.
    std::vector<const TargetGroup*> included;
    for (const auto& g : taxonomy.groups) {
        if (!counts.group_index(g.id)) continue;
        if (g.is_baseline && !baseline_in) continue;
        included.push_back(&g);
    }

    BiasTable table;
    table.scope = scope;
    table.include_baseline = baseline_in;
    for (const auto* g : included) table.included_groups.push_back(g->id);

    // per category: scope unit -> group -> normalized count
    std::map<std::string, std::map<std::string, std::map<std::string, double>>> norms_by_cat;
    for (const auto& cid : counts.category_ids) {
        const int size = lexicon.dict_size(cid);
        auto& units = norms_by_cat[cid];
        for (const auto* g : included) {
            const std::string unit =
                scope == DenominatorScope::per_category ? g->category : std::string("*");
            units[unit][g->id] = normalized_count(counts.raw_count(g->id, cid), size);
        }
        for (const auto& [unit, norms] : units) {
            double total = 0.0;
            for (const auto& [_, v] : norms) total += v;
            if (total == 0.0) table.no_detections.emplace_back(unit, cid);
        }
    }

    for (const auto* g : included) {
        for (const auto& cid : counts.category_ids) {
            const std::string unit =
                scope == DenominatorScope::per_category ? g->category : std::string("*");
            const auto& norms = norms_by_cat.at(cid).at(unit);
            BiasCell cell;
            cell.demographic_category = g->category;
            cell.group_id = g->id;
            cell.category_id = cid;
            cell.raw_count = counts.raw_count(g->id, cid);
            cell.dict_size = lexicon.dict_size(cid);
            cell.normalized_count = norms.at(g->id);
            cell.relative_bias = relative_bias(norms, g->id);
            cell.relative_bias_pct = 100.0 * cell.relative_bias;
            table.cells.push_back(std::move(cell));
        }
    }
    return table;
}

} // namespace sloganaudit
