#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coverage_ph {

struct Sample {
    std::string label;
    std::vector<double> values;
    bool log_scale = false;
};

// Which tail the one-sided tests look at.
enum class Alternative {
    Less,     // first sample stochastically smaller than the second
    Greater,  // first sample stochastically larger than the second
};

std::string_view describe(Alternative alternative);

struct TestResult {
    std::string name;
    double statistic = 0.0;
    double p_one_tailed = 1.0;
    std::string alternative;
    bool exact = false;          // Mann-Whitney: exact null distribution used
    bool small_sample = false;   // Brunner-Munzel: a sample has fewer than 10 values
};

inline constexpr double kDefaultTrimMinutes = 15.0;

// Keeps values strictly greater than the threshold.
Sample trim_short_deaths(std::span<const double> deaths, double threshold = kDefaultTrimMinutes,
                         std::string label = {});

Sample log_transform(const Sample& sample);

// Ranks 1..m with tied values sharing the mean of their positions.
std::vector<double> rank_with_ties(std::span<const double> values);

// Exact when n_a + n_b <= 20 and there are no ties; otherwise normal
// approximation with tie and continuity corrections. Statistic is U for `a`.
TestResult mann_whitney_one_sided(const Sample& a, const Sample& b,
                                  Alternative alternative = Alternative::Less);

// Number of rank assignments giving each U value, for the tie-free null of
// sizes (n_a, n_b). Index u in [0, n_a * n_b].
std::vector<double> mann_whitney_null_counts(std::size_t n_a, std::size_t n_b);

// t-distributed statistic with estimated degrees of freedom. Positive when
// `a` ranks lower than `b`.
TestResult brunner_munzel_one_sided(const Sample& a, const Sample& b,
                                    Alternative alternative = Alternative::Less);

} // namespace coverage_ph
