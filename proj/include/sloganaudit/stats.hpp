#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sloganaudit/lexicon.hpp"

namespace sloganaudit {

struct EcdfPoint {
    double value = 0.0;
    double cumulative = 0.0;  // fraction of the sample <= value

    bool operator==(const EcdfPoint&) const = default;
};

// Right-continuous empirical CDF; tied values merge into one point carrying
// their combined mass. Values strictly increase, the last fraction is 1.
struct EcdfCurve {
    std::vector<EcdfPoint> points;

    // F(x): fraction of the sample <= x.
    double at(double x) const;

    bool operator==(const EcdfCurve&) const = default;
};

// Throws AnalysisError on an empty sample.
EcdfCurve ecdf(std::span<const double> sample);

// D = max over pooled distinct values of |F_a(x) - F_b(x)|.
// Throws AnalysisError when either sample is empty.
double ks_statistic(std::span<const double> a, std::span<const double> b);

enum class PValueMethod { asymptotic, permutation };

PValueMethod parse_p_method(std::string_view s);  // throws ConfigError
std::string to_string(PValueMethod method);

struct PermutationOptions {
    int rounds = 10'000;
    std::uint64_t seed = 0;
};

// Asymptotic: p = Q_KS(lambda) with lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) * d,
// ne = na*nb/(na+nb), the alternating series truncated at |term| < 1e-12 and
// the result clamped to [0, 1]. Permutation: Monte-Carlo label shuffles of
// na+nb distinct rank values (the tie-free null), p = (1 + #{D' >= d}) / (R + 1).
// Throws AnalysisError on d outside [0, 1] or sizes < 1.
double ks_pvalue(double d, int n_a, int n_b, PValueMethod method,
                 PermutationOptions opts = {});

// Tie-aware Monte-Carlo p for concrete samples: shuffles the pooled observed
// values, so heavy ties (integer counts) condition the null correctly.
double ks_permutation_pvalue(std::span<const double> a, std::span<const double> b,
                             int rounds, std::uint64_t seed);

struct KsResult {
    std::string group_id;
    std::string category_id;
    int n_target = 0;
    int n_baseline = 0;
    double d_statistic = 0.0;
    double p_value = 0.0;
    PValueMethod p_method = PValueMethod::asymptotic;

    bool operator==(const KsResult&) const = default;
};

struct KsOptions {
    PValueMethod method = PValueMethod::asymptotic;
    int permutation_rounds = 10'000;
    std::uint64_t seed = 0;
};

// One KS test per (non-baseline group x term category) of the counts table,
// each against the baseline group's per-slogan counts. Output follows
// counts.group_ids order, then category order. The permutation method is the
// tie-aware variant, seeded per cell so results do not depend on evaluation
// order. Throws AnalysisError when the baseline is missing or has no slogans.
std::vector<KsResult> compare_to_baseline(const CountsTable& counts,
                                          const std::string& baseline_id,
                                          KsOptions opts = {});

} // namespace sloganaudit
