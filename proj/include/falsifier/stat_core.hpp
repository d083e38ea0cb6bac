#pragma once

// Statistical primitives used by the falsification procedures: one-sided
// one-sample t-test, Wilcoxon signed-rank test, normality/outlier screens and
// the distribution functions behind them.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace falsifier {

enum class TestMethod { TTest, WilcoxonExact, WilcoxonNormal, RankPermutation, RankNormal };

std::string_view to_string(TestMethod method) noexcept;

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    TestMethod method = TestMethod::TTest;
    std::size_t n_effective = 0;
    std::vector<std::string> notes;
};

// ---- distribution functions -------------------------------------------------

double std_normal_cdf(double x) noexcept;
// Upper tail 1 - Phi(x), accurate far into the tail.
double std_normal_sf(double x) noexcept;

// I_x(a, b) by continued fraction (modified Lentz), |error| < 1e-12.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double x, double df);
double student_t_sf(double x, double df);

// ---- ranks and quantiles ----------------------------------------------------

// 1-based ranks, ties receive the average of the positions they span.
std::vector<double> average_ranks(std::span<const double> values);

// Quantile by linear interpolation between order statistics, h = (n-1)q.
double quantile_linear(std::span<const double> sorted, double q);

// ---- tests -----------------------------------------------------------------

// H0: E[d] <= 0 vs H1: E[d] > 0. Throws TooFewSamples (n < 2) and
// DegenerateVariance (all values equal).
TestResult t_test_one_sided_greater(std::span<const double> diffs);

enum class WilcoxonMode { Exact, Normal, Auto };

std::string_view to_string(WilcoxonMode mode) noexcept;
WilcoxonMode parse_wilcoxon_mode(std::string_view text);

// Exact mode is used by Auto up to this many non-zero differences.
inline constexpr std::size_t kWilcoxonExactMaxN = 50;

// One-sided (upper-tail) signed-rank test. Exact zeros are dropped, |d| is
// ranked with tie-averaging, W = sum sign(d_i) * r_i. The exact null is the
// distribution of sum(+-r_i) over independent fair signs on the observed rank
// multiset, so it stays exact under ties. Normal mode uses Var(W) = sum r_i^2
// and a continuity correction of 1. Throws AllZeroDifferences.
TestResult wilcoxon_signed_rank(std::span<const double> diffs, WilcoxonMode mode = WilcoxonMode::Auto);

// ---- diagnostics ------------------------------------------------------------

inline constexpr std::size_t kNormalityMinN = 20;

struct NormalityResult {
    // Absent when n < 20 or the sample has zero variance ("not assessed").
    std::optional<double> statistic;
    std::optional<double> p_value;
};

// D'Agostino-Pearson K^2 omnibus test; p from chi-square(2), exp(-K^2/2).
NormalityResult normality_check(std::span<const double> values);

// Points outside the Tukey fences [Q1 - 1.5 IQR, Q3 + 1.5 IQR]. Needs n >= 4.
std::size_t outlier_check(std::span<const double> values);

enum class Recommendation { TTest, Wilcoxon };
std::string_view to_string(Recommendation r) noexcept;

struct DiagnosticReport {
    std::optional<double> normality_p;
    std::optional<std::size_t> n_outliers;  // absent when n < 4
    Recommendation recommendation = Recommendation::Wilcoxon;
};

// t-test is recommended only when normality is assessed and not rejected at
// 0.05, there are no outliers, and n >= 20.
DiagnosticReport diagnose(std::span<const double> diffs);

}  // namespace falsifier
