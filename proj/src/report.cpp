#include "sloganaudit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "sloganaudit/errors.hpp"
#include "sloganaudit/version.hpp"

namespace sloganaudit {

namespace {

nlohmann::json curve_points(const std::vector<int>& counts) {
    nlohmann::json arr = nlohmann::json::array();
    if (counts.empty()) return arr;
    std::vector<double> values(counts.begin(), counts.end());
    for (const auto& p : ecdf(values).points) {
        arr.push_back(nlohmann::json::array({p.value, p.cumulative}));
    }
    return arr;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

} // namespace

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

void write_bias_csv(const BiasTable& table, std::ostream& out) {
    out << "demographic_category,target_group,term_category,raw_count,dict_size,"
           "normalized_count,relative_bias_pct\n";
    for (const auto& cell : table.cells) {
        out << csv_escape(cell.demographic_category) << ',' << csv_escape(cell.group_id) << ','
            << csv_escape(cell.category_id) << ',' << cell.raw_count << ',' << cell.dict_size
            << ',' << format_fixed(cell.normalized_count, 6) << ','
            << format_fixed(cell.relative_bias_pct, 2) << '\n';
    }
}

void write_ks_csv(const std::vector<KsResult>& results, const Taxonomy& taxonomy,
                  std::optional<double> alpha, std::ostream& out) {
    out << "demographic_category,target_group,term_category,n_target,n_baseline,"
           "d_statistic,p_value,p_method";
    if (alpha) out << ",significant";
    out << '\n';
    for (const auto& r : results) {
        const TargetGroup* g = taxonomy.find_group(r.group_id);
        out << csv_escape(g ? g->category : "") << ',' << csv_escape(r.group_id) << ','
            << csv_escape(r.category_id) << ',' << r.n_target << ',' << r.n_baseline << ','
            << format_fixed(r.d_statistic, 6) << ',' << format_fixed(r.p_value, 6) << ','
            << to_string(r.p_method);
        if (alpha) out << ',' << (r.p_value < *alpha ? "true" : "false");
        out << '\n';
    }
}

nlohmann::json cdf_export_json(const CountsTable& counts, const std::string& baseline_id) {
    const auto base_idx = counts.group_index(baseline_id);
    if (!base_idx) throw AnalysisError("baseline group '" + baseline_id + "' not in counts");

    nlohmann::json j;
    j["baseline_id"] = baseline_id;
    nlohmann::json base = nlohmann::json::object();
    for (std::size_t c = 0; c < counts.category_ids.size(); ++c) {
        base[counts.category_ids[c]] = curve_points(counts.per_slogan[*base_idx][c]);
    }
    j["baseline"] = std::move(base);

    nlohmann::json groups = nlohmann::json::object();
    for (std::size_t g = 0; g < counts.group_ids.size(); ++g) {
        if (g == *base_idx) continue;
        nlohmann::json per_cat = nlohmann::json::object();
        for (std::size_t c = 0; c < counts.category_ids.size(); ++c) {
            per_cat[counts.category_ids[c]] = curve_points(counts.per_slogan[g][c]);
        }
        groups[counts.group_ids[g]] = std::move(per_cat);
    }
    j["groups"] = std::move(groups);
    return j;
}

nlohmann::json report_json(const AuditConfig& config, const Corpus& corpus,
                           const BiasTable& table, const std::vector<KsResult>& results) {
    nlohmann::json j;
    j["tool_version"] = kVersion;
    j["corpus_digest"] = corpus.digest_hex();
    j["n_slogans"] = corpus.size();
    j["config"] = config.to_json();

    nlohmann::json bias;
    bias["scope"] = to_string(table.scope);
    bias["include_baseline"] = table.include_baseline;
    bias["included_groups"] = table.included_groups;
    bias["cells"] = nlohmann::json::array();
    for (const auto& cell : table.cells) {
        bias["cells"].push_back({{"demographic_category", cell.demographic_category},
                                 {"target_group", cell.group_id},
                                 {"term_category", cell.category_id},
                                 {"raw_count", cell.raw_count},
                                 {"dict_size", cell.dict_size},
                                 {"normalized_count", cell.normalized_count},
                                 {"relative_bias", cell.relative_bias},
                                 {"relative_bias_pct", cell.relative_bias_pct}});
    }
    bias["no_detections"] = nlohmann::json::array();
    for (const auto& [unit, cat] : table.no_detections) {
        bias["no_detections"].push_back({{"scope_unit", unit}, {"term_category", cat}});
    }
    j["bias_table"] = std::move(bias);

    j["ks_results"] = nlohmann::json::array();
    for (const auto& r : results) {
        j["ks_results"].push_back({{"target_group", r.group_id},
                                   {"term_category", r.category_id},
                                   {"n_target", r.n_target},
                                   {"n_baseline", r.n_baseline},
                                   {"d_statistic", r.d_statistic},
                                   {"p_value", r.p_value},
                                   {"p_method", to_string(r.p_method)}});
    }
    return j;
}

std::string console_grid(const BiasTable& table, const Taxonomy& taxonomy,
                         const Lexicon& lexicon) {
    const auto category_ids = lexicon.category_ids();

    std::vector<std::string> headers = {"Category", "Target Group"};
    for (const auto& cid : category_ids) {
        const auto* cat = lexicon.find(cid);
        headers.push_back(cat ? cat->info.display_name : cid);
    }

    std::vector<std::vector<std::string>> rows;
    std::string last_category;
    for (const auto* g : taxonomy.targets()) {
        std::vector<std::string> row;
        const auto* cat = taxonomy.find_category(g->category);
        const std::string cat_label = cat ? cat->display_name : g->category;
        row.push_back(cat_label == last_category ? "" : cat_label);
        last_category = cat_label;
        row.push_back(g->descriptor);
        for (const auto& cid : category_ids) {
            const BiasCell* cell = table.find(g->id, cid);
            row.push_back(cell ? format_fixed(cell->relative_bias_pct, 2) + "%" : "-");
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> widths(headers.size());
    for (std::size_t i = 0; i < headers.size(); ++i) widths[i] = headers[i].size();
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    }

    auto emit = [&](const std::vector<std::string>& row, std::string& out) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += "  ";
            // left-align labels, right-align numbers
            if (i < 2) {
                out += row[i];
                out.append(widths[i] - row[i].size(), ' ');
            } else {
                out.append(widths[i] - row[i].size(), ' ');
                out += row[i];
            }
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };

    std::string out;
    emit(headers, out);
    std::string rule;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (i) rule += "  ";
        rule.append(widths[i], '-');
    }
    out += rule + '\n';
    for (const auto& row : rows) emit(row, out);
    return out;
}

} // namespace sloganaudit
