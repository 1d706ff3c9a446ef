#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sloganaudit/bias.hpp"
#include "sloganaudit/config.hpp"
#include "sloganaudit/stats.hpp"

namespace sloganaudit {

// Fixed-precision float text (snprintf "%.*f"); keeps CSV output
// byte-stable across platforms.
std::string format_fixed(double v, int digits);

// bias_table.csv: demographic_category, target_group, term_category,
// raw_count, dict_size, normalized_count, relative_bias_pct. Percentages at
// 2 decimals, normalized counts at 6. LF line endings.
void write_bias_csv(const BiasTable& table, std::ostream& out);

// ks_results.csv: demographic_category, target_group, term_category,
// n_target, n_baseline, d_statistic, p_value, p_method. D and p at
// 6 decimals. With alpha set, a trailing `significant` column (p < alpha).
void write_ks_csv(const std::vector<KsResult>& results, const Taxonomy& taxonomy,
                  std::optional<double> alpha, std::ostream& out);

// Per (group x category) ECDF point lists plus the baseline curves; enough
// to redraw the CDF comparison figures with any plotting tool.
nlohmann::json cdf_export_json(const CountsTable& counts, const std::string& baseline_id);

// Full machine-readable report: bias table, KS results, corpus digest, tool
// version and the config echo.
nlohmann::json report_json(const AuditConfig& config, const Corpus& corpus,
                           const BiasTable& table, const std::vector<KsResult>& results);

// Wide console table: one row per non-baseline group (taxonomy order,
// grouped by demographic category), one column per term category,
// percentages at 2 decimals.
std::string console_grid(const BiasTable& table, const Taxonomy& taxonomy,
                         const Lexicon& lexicon);

} // namespace sloganaudit
