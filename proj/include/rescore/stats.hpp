#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "rescore/errors.hpp"

namespace rescore::stats {

struct WilcoxonResult {
    enum class Method { exact, normal_approx };

    double w_statistic = 0.0; // min(W+, W-)
    int n_effective = 0;      // pairs remaining after zero-differences are dropped
    double p_value = 1.0;     // two-sided
    double effect_size_r = 0.0;
    Method method = Method::exact;

    double w_plus = 0.0;
    double w_minus = 0.0;
    double z = 0.0; // normal-approximation Z (also used for r on the exact path)
};

inline constexpr int kExactEnumerationCutoff = 25;

/// Effect size r is reported as |Z|/sqrt(n) with Z from the tie-corrected
/// normal approximation; reports must document this convention.
inline constexpr const char* kEffectSizeNote =
    "effect_size_r = |Z|/sqrt(n_effective), Z from the tie-corrected normal "
    "approximation with continuity correction";

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Average ranks of |d| values; returns ranks doubled so ties stay integral,
/// plus the tie-correction term sum(t^3 - t).
inline void ranks_doubled(const std::vector<double>& abs_d, std::vector<long>& ranks2,
                          double& tie_term) {
    const std::size_t n = abs_d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return abs_d[a] < abs_d[b]; });
    ranks2.assign(n, 0);
    tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && abs_d[order[j]] == abs_d[order[i]]) ++j;
        // ranks i+1 .. j averaged; doubled average = (i+1) + j
        long rank2 = static_cast<long>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks2[order[k]] = rank2;
        double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
}

} // namespace detail

/// Classical two-sided Wilcoxon signed-rank test: zero differences dropped,
/// average ranks for ties, w = min(W+, W-). For n <= 25 the two-sided p is
/// computed exactly by enumerating sign assignments conditional on the
/// observed ranks (a subset-sum count over doubled ranks); larger samples
/// use the normal approximation with tie correction and continuity
/// correction.
inline WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());

    std::vector<double> diffs;
    diffs.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) throw NoNonzeroDifferences();

    const int n = static_cast<int>(diffs.size());
    std::vector<double> abs_d(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) abs_d[i] = std::fabs(diffs[i]);

    std::vector<long> ranks2;
    double tie_term = 0.0;
    detail::ranks_doubled(abs_d, ranks2, tie_term);

    long w_plus2 = 0;
    long total2 = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        total2 += ranks2[i];
        if (diffs[i] > 0) w_plus2 += ranks2[i];
    }
    const long w_minus2 = total2 - w_plus2;
    const long w_lo2 = std::min(w_plus2, w_minus2);
    const long w_hi2 = total2 - w_lo2;

    WilcoxonResult result;
    result.n_effective = n;
    result.w_plus = static_cast<double>(w_plus2) / 2.0;
    result.w_minus = static_cast<double>(w_minus2) / 2.0;
    result.w_statistic = static_cast<double>(w_lo2) / 2.0;

    // Normal machinery (p for large n; Z feeds the effect size everywhere).
    const double dn = static_cast<double>(n);
    const double mean = dn * (dn + 1.0) / 4.0;
    const double variance = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0;
    const double sd = std::sqrt(variance);
    const double w = result.w_statistic;
    double z = 0.0;
    if (sd > 0.0 && w != mean) {
        // continuity correction toward the mean
        z = w < mean ? (w - mean + 0.5) / sd : (w - mean - 0.5) / sd;
    }
    result.z = z;
    result.effect_size_r = std::fabs(z) / std::sqrt(dn);

    if (n <= kExactEnumerationCutoff) {
        // Count sign assignments by doubled-rank subset sums. Counts are
        // exact in doubles: they never exceed 2^25.
        std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
        counts[0] = 1.0;
        for (long r2 : ranks2)
            for (long s = total2 - r2; s >= 0; --s)
                if (counts[static_cast<std::size_t>(s)] != 0.0)
                    counts[static_cast<std::size_t>(s + r2)] += counts[static_cast<std::size_t>(s)];

        double lo_tail = 0.0;
        for (long s = 0; s <= w_lo2; ++s) lo_tail += counts[static_cast<std::size_t>(s)];
        double hi_tail = 0.0;
        for (long s = w_hi2; s <= total2; ++s) hi_tail += counts[static_cast<std::size_t>(s)];
        const double denom = std::pow(2.0, dn);
        result.p_value = std::min(1.0, (lo_tail + hi_tail) / denom);
        result.method = WilcoxonResult::Method::exact;
    } else {
        result.p_value = std::min(1.0, 2.0 * detail::normal_cdf(-std::fabs(z)));
        if (result.p_value <= 0.0) result.p_value = std::numeric_limits<double>::min();
        result.method = WilcoxonResult::Method::normal_approx;
    }
    return result;
}

struct AgreementStats {
    double exact = 0.0;      // fraction a_i == b_i
    double within_one = 0.0; // fraction |a_i - b_i| <= 1
    double mean_bias = 0.0;  // mean(a_i - b_i): positive means A rates higher
    std::array<std::array<long, 4>, 4> confusion{}; // [a-1][b-1]
    long n = 0;
};

/// Raw agreement over two equal-length lists of ordinal scores in 1..4.
inline AgreementStats agreement(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw LengthMismatch(a.size(), b.size());
    if (a.empty()) throw EmptyInput();

    AgreementStats stats;
    stats.n = static_cast<long>(a.size());
    long exact_count = 0;
    long within_count = 0;
    long bias_sum = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 1 || a[i] > 4) throw OutOfRange(std::to_string(a[i]));
        if (b[i] < 1 || b[i] > 4) throw OutOfRange(std::to_string(b[i]));
        if (a[i] == b[i]) ++exact_count;
        if (std::abs(a[i] - b[i]) <= 1) ++within_count;
        bias_sum += a[i] - b[i];
        ++stats.confusion[static_cast<std::size_t>(a[i] - 1)][static_cast<std::size_t>(b[i] - 1)];
    }
    stats.exact = static_cast<double>(exact_count) / static_cast<double>(stats.n);
    stats.within_one = static_cast<double>(within_count) / static_cast<double>(stats.n);
    stats.mean_bias = static_cast<double>(bias_sum) / static_cast<double>(stats.n);
    return stats;
}

} // namespace rescore::stats
