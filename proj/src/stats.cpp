#include "coverage_ph/stats.hpp"

#include "coverage_ph/error.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace coverage_ph {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

bool has_ties(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return std::adjacent_find(values.begin(), values.end()) != values.end();
}

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

std::string_view describe(Alternative alternative) {
    return alternative == Alternative::Less ? "first sample stochastically less than second"
                                            : "first sample stochastically greater than second";
}

Sample trim_short_deaths(std::span<const double> deaths, double threshold, std::string label) {
    Sample out;
    out.label = std::move(label);
    for (double d : deaths) {
        if (!std::isfinite(d)) throw ValidationError("trim expects finite deaths");
        if (d > threshold) out.values.push_back(d);
    }
    if (out.values.empty()) throw ValidationError("no observations above threshold");
    return out;
}

Sample log_transform(const Sample& sample) {
    Sample out;
    out.label = sample.label;
    out.log_scale = true;
    out.values.reserve(sample.values.size());
    for (double v : sample.values) {
        if (!(v > 0.0)) throw ValidationError("log transform requires positive values");
        out.values.push_back(std::log(v));
    }
    return out;
}

std::vector<double> rank_with_ties(std::span<const double> values) {
    const std::size_t m = values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(m);
    for (std::size_t i = 0; i < m;) {
        std::size_t j = i + 1;
        while (j < m && values[order[j]] == values[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = midrank;
        i = j;
    }
    return ranks;
}

std::vector<double> mann_whitney_null_counts(std::size_t n_a, std::size_t n_b) {
    // counts[m][u] for the current n over m = 0..n_a; built up one b-element at a time.
    // f(m, n, u) = f(m-1, n, u-n) + f(m, n-1, u)
    const std::size_t max_u = n_a * n_b;
    std::vector<std::vector<double>> prev(n_a + 1, std::vector<double>(max_u + 1, 0.0));
    for (std::size_t m = 0; m <= n_a; ++m) prev[m][0] = 1.0;  // n = 0
    for (std::size_t n = 1; n <= n_b; ++n) {
        std::vector<std::vector<double>> cur(n_a + 1, std::vector<double>(max_u + 1, 0.0));
        cur[0][0] = 1.0;
        for (std::size_t m = 1; m <= n_a; ++m) {
            for (std::size_t u = 0; u <= m * n; ++u) {
                double ways = prev[m][u];
                if (u >= n) ways += cur[m - 1][u - n];
                cur[m][u] = ways;
            }
        }
        prev = std::move(cur);
    }
    return prev[n_a];
}

TestResult mann_whitney_one_sided(const Sample& a, const Sample& b, Alternative alternative) {
    const std::size_t na = a.values.size();
    const std::size_t nb = b.values.size();
    if (na < 2 || nb < 2) throw ValidationError("Mann-Whitney requires at least 2 values per sample");

    std::vector<double> pooled(a.values);
    pooled.insert(pooled.end(), b.values.begin(), b.values.end());
    auto ranks = rank_with_ties(pooled);
    const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(na), 0.0);
    const double dna = static_cast<double>(na);
    const double dnb = static_cast<double>(nb);
    const double u = rank_sum_a - dna * (dna + 1.0) / 2.0;

    TestResult r;
    r.name = "mann-whitney";
    r.statistic = u;
    r.alternative = describe(alternative);

    if (na + nb <= 20 && !has_ties(pooled)) {
        auto counts = mann_whitney_null_counts(na, nb);
        const auto observed = static_cast<std::size_t>(std::llround(u));
        double tail = 0.0;
        double total = 0.0;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            total += counts[k];
            if (alternative == Alternative::Less ? k <= observed : k >= observed) tail += counts[k];
        }
        r.exact = true;
        r.p_one_tailed = clamp_probability(tail / total);
        return r;
    }

    // tie-corrected variance
    const double n = dna + dnb;
    std::vector<double> sorted(pooled);
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double mu = dna * dnb / 2.0;
    const double var = dna * dnb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if (var <= 0.0) {
        // every observation tied: U sits at its mean
        r.p_one_tailed = 1.0;
        return r;
    }
    const double sd = std::sqrt(var);
    if (alternative == Alternative::Less) {
        r.p_one_tailed = clamp_probability(normal_cdf((u - mu + 0.5) / sd));
    } else {
        r.p_one_tailed = clamp_probability(normal_cdf(-(u - mu - 0.5) / sd));
    }
    return r;
}

TestResult brunner_munzel_one_sided(const Sample& a, const Sample& b, Alternative alternative) {
    const std::size_t na = a.values.size();
    const std::size_t nb = b.values.size();
    if (na < 2 || nb < 2) throw ValidationError("Brunner-Munzel requires at least 2 values per sample");

    std::vector<double> pooled(a.values);
    pooled.insert(pooled.end(), b.values.begin(), b.values.end());
    auto pooled_ranks = rank_with_ties(pooled);
    std::span<const double> pooled_a(pooled_ranks.data(), na);
    std::span<const double> pooled_b(pooled_ranks.data() + na, nb);
    auto within_a = rank_with_ties(a.values);
    auto within_b = rank_with_ties(b.values);

    const double mean_pa = mean(pooled_a);
    const double mean_pb = mean(pooled_b);
    const double mean_wa = mean(within_a);
    const double mean_wb = mean(within_b);
    double var_a = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
        const double dev = pooled_a[i] - within_a[i] - mean_pa + mean_wa;
        var_a += dev * dev;
    }
    var_a /= static_cast<double>(na - 1);
    double var_b = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        const double dev = pooled_b[i] - within_b[i] - mean_pb + mean_wb;
        var_b += dev * dev;
    }
    var_b /= static_cast<double>(nb - 1);

    const double dna = static_cast<double>(na);
    const double dnb = static_cast<double>(nb);
    TestResult r;
    r.name = "brunner-munzel";
    r.alternative = describe(alternative);
    r.small_sample = na < 10 || nb < 10;

    const double spread = dna * var_a + dnb * var_b;
    const double shift = mean_pb - mean_pa;
    if (spread == 0.0) {
        // Placements are constant: either complete separation or full overlap.
        if (shift == 0.0) throw ValidationError("degenerate ranks");
        r.statistic = shift > 0.0 ? std::numeric_limits<double>::infinity()
                                  : -std::numeric_limits<double>::infinity();
        const bool a_lower = shift > 0.0;
        r.p_one_tailed = (alternative == Alternative::Less) == a_lower ? 0.0 : 1.0;
        return r;
    }

    const double statistic = dna * dnb * shift / ((dna + dnb) * std::sqrt(spread));
    const double df_denom = (dna * var_a) * (dna * var_a) / (dna - 1.0) +
                            (dnb * var_b) * (dnb * var_b) / (dnb - 1.0);
    const double df = spread * spread / df_denom;
    boost::math::students_t dist(df);
    r.statistic = statistic;
    // large statistic: a ranks below b
    r.p_one_tailed = alternative == Alternative::Less
                         ? boost::math::cdf(boost::math::complement(dist, statistic))
                         : boost::math::cdf(dist, statistic);
    r.p_one_tailed = clamp_probability(r.p_one_tailed);
    return r;
}

} // namespace coverage_ph
