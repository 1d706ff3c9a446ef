#include "sloganaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sloganaudit/digest.hpp"
#include "sloganaudit/errors.hpp"

namespace sloganaudit {

namespace {

// Fisher-Yates with raw mt19937_64 draws; std::shuffle and the std
// distributions are implementation-defined, this stays byte-stable across
// platforms.
template <typename T>
void deterministic_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(v[i - 1], v[j]);
    }
}

// D between two sorted samples via a two-pointer sweep over pooled values.
double ks_sorted(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    // Once one sample is exhausted its ECDF equals 1 past its maximum; the
    // remaining pooled values can only shrink the gap, except where the other
    // ECDF is still short of 1 -- covered by the last comparison above.
    if (i < a.size() || j < b.size()) {
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return std::min(1.0, d);
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view a, std::string_view b) {
    Fnv64 h;
    h.update(seed);
    h.update(a).sep().update(b).sep();
    return h.value();
}

} // namespace

double EcdfCurve::at(double x) const {
    double f = 0.0;
    for (const auto& p : points) {
        if (p.value <= x)
            f = p.cumulative;
        else
            break;
    }
    return f;
}

EcdfCurve ecdf(std::span<const double> sample) {
    if (sample.empty()) throw AnalysisError("ecdf of an empty sample");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());

    EcdfCurve curve;
    const double n = static_cast<double>(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double v = sorted[i];
        while (i < sorted.size() && sorted[i] == v) ++i;
        curve.points.push_back({v, static_cast<double>(i) / n});
    }
    return curve;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw AnalysisError("ks_statistic needs two nonempty samples");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    return ks_sorted(sa, sb);
}

PValueMethod parse_p_method(std::string_view s) {
    if (s == "asymptotic") return PValueMethod::asymptotic;
    if (s == "permutation") return PValueMethod::permutation;
    throw ConfigError("unknown p-value method '" + std::string(s) +
                      "' (expected asymptotic | permutation)");
}

std::string to_string(PValueMethod method) {
    return method == PValueMethod::asymptotic ? "asymptotic" : "permutation";
}

namespace {

// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), truncated once
// a term drops below 1e-12 in magnitude. Partial sums stay bounded, so an
// unconverged (tiny lambda) evaluation clamps to 1.
double ks_series(double lambda) {
    if (lambda <= 0.0) return 1.0;
    constexpr int kMaxTerms = 100'000;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= kMaxTerms; ++k) {
        const double term = std::exp(-2.0 * lambda * lambda * static_cast<double>(k) *
                                     static_cast<double>(k));
        sum += sign * term;
        sign = -sign;
        if (term < 1e-12) return std::clamp(2.0 * sum, 0.0, 1.0);
    }
    return 1.0;
}

double permutation_pvalue_pooled(std::vector<double> pooled, std::size_t n_a, double d_obs,
                                 int rounds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    int at_least = 0;
    std::vector<double> a(n_a), b(pooled.size() - n_a);
    for (int r = 0; r < rounds; ++r) {
        deterministic_shuffle(pooled, rng);
        a.assign(pooled.begin(), pooled.begin() + static_cast<std::ptrdiff_t>(n_a));
        b.assign(pooled.begin() + static_cast<std::ptrdiff_t>(n_a), pooled.end());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (ks_sorted(a, b) >= d_obs - 1e-12) ++at_least;
    }
    return static_cast<double>(1 + at_least) / static_cast<double>(rounds + 1);
}

} // namespace

double ks_pvalue(double d, int n_a, int n_b, PValueMethod method, PermutationOptions opts) {
    if (d < 0.0 || d > 1.0) throw AnalysisError("ks_pvalue: d must be in [0, 1]");
    if (n_a < 1 || n_b < 1) throw AnalysisError("ks_pvalue: sample sizes must be >= 1");

    if (method == PValueMethod::asymptotic) {
        const double ne =
            static_cast<double>(n_a) * static_cast<double>(n_b) / (n_a + n_b);
        const double sqrt_ne = std::sqrt(ne);
        const double lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
        return ks_series(lambda);
    }

    if (opts.rounds < 1) throw AnalysisError("ks_pvalue: permutation rounds must be >= 1");
    // Label shuffles over n_a+n_b distinct ranks: the tie-free null, which is
    // all the (d, n_a, n_b) signature can condition on.
    std::vector<double> pooled(static_cast<std::size_t>(n_a + n_b));
    std::iota(pooled.begin(), pooled.end(), 0.0);
    return permutation_pvalue_pooled(std::move(pooled), static_cast<std::size_t>(n_a), d,
                                     opts.rounds, opts.seed);
}

double ks_permutation_pvalue(std::span<const double> a, std::span<const double> b, int rounds,
                             std::uint64_t seed) {
    if (a.empty() || b.empty())
        throw AnalysisError("ks_permutation_pvalue needs two nonempty samples");
    if (rounds < 1) throw AnalysisError("ks_permutation_pvalue: rounds must be >= 1");
    const double d_obs = ks_statistic(a, b);
    std::vector<double> pooled;
    pooled.reserve(a.size() + b.size());
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    return permutation_pvalue_pooled(std::move(pooled), a.size(), d_obs, rounds, seed);
}

std::vector<KsResult> compare_to_baseline(const CountsTable& counts,
                                          const std::string& baseline_id, KsOptions opts) {
    const auto base_idx = counts.group_index(baseline_id);
    if (!base_idx) throw AnalysisError("baseline group '" + baseline_id + "' not in counts");
    if (counts.n_slogans[*base_idx] < 1)
        throw AnalysisError("baseline group '" + baseline_id + "' has no slogans");

    std::vector<KsResult> results;
    for (std::size_t g = 0; g < counts.group_ids.size(); ++g) {
        if (counts.group_ids[g] == baseline_id) continue;
        for (std::size_t c = 0; c < counts.category_ids.size(); ++c) {
            const auto& target_counts = counts.per_slogan[g][c];
            const auto& base_counts = counts.per_slogan[*base_idx][c];
            if (target_counts.empty())
                throw AnalysisError("group '" + counts.group_ids[g] + "' has no slogans");

            std::vector<double> a(target_counts.begin(), target_counts.end());
            std::vector<double> b(base_counts.begin(), base_counts.end());

            KsResult r;
            r.group_id = counts.group_ids[g];
            r.category_id = counts.category_ids[c];
            r.n_target = static_cast<int>(a.size());
            r.n_baseline = static_cast<int>(b.size());
            r.d_statistic = ks_statistic(a, b);
            r.p_method = opts.method;
            if (opts.method == PValueMethod::asymptotic) {
                r.p_value = ks_pvalue(r.d_statistic, r.n_target, r.n_baseline,
                                      PValueMethod::asymptotic);
            } else {
                // Per-cell seed: results stay reproducible under any
                // evaluation order or future fan-out.
                const std::uint64_t cell_seed =
                    mix_seed(opts.seed, r.group_id, r.category_id);
                r.p_value =
                    ks_permutation_pvalue(a, b, opts.permutation_rounds, cell_seed);
            }
            results.push_back(std::move(r));
        }
    }
    return results;
}

} // namespace sloganaudit
