#include "falsifier/stat_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "falsifier/error.hpp"

namespace falsifier {

std::string_view to_string(TestMethod method) noexcept {
    switch (method) {
        case TestMethod::TTest: return "t_test";
        case TestMethod::WilcoxonExact: return "wilcoxon_exact";
        case TestMethod::WilcoxonNormal: return "wilcoxon_normal";
        case TestMethod::RankPermutation: return "rank_permutation";
        case TestMethod::RankNormal: return "rank_normal";
    }
    return "unknown";
}

std::string_view to_string(Recommendation r) noexcept {
    return r == Recommendation::TTest ? "t_test" : "wilcoxon";
}

std::string_view to_string(WilcoxonMode mode) noexcept {
    switch (mode) {
        case WilcoxonMode::Exact: return "exact";
        case WilcoxonMode::Normal: return "normal";
        case WilcoxonMode::Auto: return "auto";
    }
    return "auto";
}

WilcoxonMode parse_wilcoxon_mode(std::string_view text) {
    for (auto m : {WilcoxonMode::Exact, WilcoxonMode::Normal, WilcoxonMode::Auto})
        if (text == to_string(m)) return m;
    fail(ErrorCode::ConfigError, "unknown Wilcoxon mode '" + std::string(text) + "' (exact, normal, auto)");
}

namespace {

double log_gamma(double x) noexcept {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);  // lgamma() writes the global signgam
#else
    return std::lgamma(x);
#endif
}

// Continued fraction for I_x(a,b), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 20000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    fail(ErrorCode::NoConvergence, "incomplete beta continued fraction did not converge");
}

// I_x(a,b) with y = 1 - x supplied separately to keep precision near x = 1.
double incomplete_beta(double a, double b, double x, double y) {
    if (x <= 0.0) return 0.0;
    if (y <= 0.0) return 1.0;
    const double log_front =
        log_gamma(a + b) - log_gamma(a) - log_gamma(b) + a * std::log(x) + b * std::log(y);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

double std_normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double std_normal_sf(double x) noexcept { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) fail(ErrorCode::ConfigError, "incomplete beta needs a, b > 0");
    if (!(x >= 0.0 && x <= 1.0)) fail(ErrorCode::ConfigError, "incomplete beta needs x in [0, 1]");
    return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_sf(double x, double df) {
    if (!(df > 0.0)) fail(ErrorCode::ConfigError, "Student-t degrees of freedom must be positive");
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    const double t2 = x * x;
    // P(|T| > |x|) = I_{df/(df+x^2)}(df/2, 1/2)
    const double two_sided = incomplete_beta(0.5 * df, 0.5, df / (df + t2), t2 / (df + t2));
    return x >= 0.0 ? 0.5 * two_sided : 1.0 - 0.5 * two_sided;
}

double student_t_cdf(double x, double df) {
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    return student_t_sf(-x, df);
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        // positions i+1 .. j share the average rank
        const double avg = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

double quantile_linear(std::span<const double> sorted, double q) {
    if (sorted.empty()) fail(ErrorCode::TooFewSamples, "quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

TestResult t_test_one_sided_greater(std::span<const double> diffs) {
    const std::size_t n = diffs.size();
    if (n < 2) fail(ErrorCode::TooFewSamples, "t-test needs at least 2 observations");
    const double mean = std::accumulate(diffs.begin(), diffs.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double d : diffs) ss += (d - mean) * (d - mean);
    const bool all_equal =
        std::all_of(diffs.begin(), diffs.end(), [&](double d) { return d == diffs.front(); });
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (all_equal || !(sd > 0.0))
        fail(ErrorCode::DegenerateVariance, "t-test undefined: all differences are equal");

    TestResult r;
    r.method = TestMethod::TTest;
    r.statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p_value = std::clamp(student_t_sf(r.statistic, static_cast<double>(n - 1)), 0.0, 1.0);
    r.n_effective = n;
    return r;
}

TestResult wilcoxon_signed_rank(std::span<const double> diffs, WilcoxonMode mode) {
    std::vector<double> nonzero;
    nonzero.reserve(diffs.size());
    for (double d : diffs) {
        if (d != 0.0) nonzero.push_back(d);
    }
    const std::size_t dropped = diffs.size() - nonzero.size();
    const std::size_t n = nonzero.size();
    if (n == 0) fail(ErrorCode::AllZeroDifferences, "all differences are zero; the signed-rank test has no information");

    std::vector<double> abs_vals(n);
    for (std::size_t i = 0; i < n; ++i) abs_vals[i] = std::fabs(nonzero[i]);
    const auto ranks = average_ranks(abs_vals);

    // Tie-averaged ranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<std::int64_t> doubled(n);
    std::int64_t total = 0;
    std::int64_t positive = 0;
    double w = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        doubled[i] = std::llround(2.0 * ranks[i]);
        total += doubled[i];
        if (nonzero[i] > 0.0) {
            positive += doubled[i];
            w += ranks[i];
        } else {
            w -= ranks[i];
        }
        sum_sq += ranks[i] * ranks[i];
    }

    const bool exact = mode == WilcoxonMode::Exact || (mode == WilcoxonMode::Auto && n <= kWilcoxonExactMaxN);

    TestResult r;
    r.statistic = w;
    r.n_effective = n;
    if (dropped > 0) r.notes.push_back("dropped " + std::to_string(dropped) + " zero difference(s)");

    if (exact) {
        // dist[s] = P(sum of doubled ranks carrying a + sign == s). Each entry
        // is a dyadic rational, exact in double while n <= 53.
        std::vector<double> dist(static_cast<std::size_t>(total) + 1, 0.0);
        dist[0] = 1.0;
        std::int64_t reach = 0;
        for (std::int64_t d : doubled) {
            reach += d;
            for (std::int64_t s = reach; s >= 0; --s) {
                const double with = s >= d ? dist[static_cast<std::size_t>(s - d)] : 0.0;
                dist[static_cast<std::size_t>(s)] = 0.5 * (dist[static_cast<std::size_t>(s)] + with);
            }
        }
        double p = 0.0;
        for (std::int64_t s = positive; s <= total; ++s) p += dist[static_cast<std::size_t>(s)];
        r.method = TestMethod::WilcoxonExact;
        r.p_value = std::clamp(p, 0.0, 1.0);
    } else {
        const double z = (w - 1.0) / std::sqrt(sum_sq);
        r.method = TestMethod::WilcoxonNormal;
        r.p_value = std::clamp(std_normal_sf(z), 0.0, 1.0);
    }
    return r;
}

NormalityResult normality_check(std::span<const double> values) {
    NormalityResult out;
    const std::size_t n_size = values.size();
    if (n_size < kNormalityMinN) return out;
    const double n = static_cast<double>(n_size);

    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) return out;

    // Skewness z-transform (D'Agostino 1970).
    const double b1 = m3 / std::pow(m2, 1.5);
    double y = b1 * std::sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)));
    const double beta2 = 3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0) /
                         ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0));
    const double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
    const double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
    const double alpha = std::sqrt(2.0 / (w2 - 1.0));
    if (y == 0.0) y = 1.0;
    const double ya = y / alpha;
    const double z_skew = delta * std::log(ya + std::sqrt(ya * ya + 1.0));

    // Kurtosis z-transform (Anscombe & Glynn 1983).
    const double b2 = m4 / (m2 * m2);
    const double e_b2 = 3.0 * (n - 1.0) / (n + 1.0);
    const double var_b2 = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) * (n + 1.0) * (n + 3.0) * (n + 5.0));
    const double x = (b2 - e_b2) / std::sqrt(var_b2);
    const double sqrt_beta1 = 6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0)) *
                              std::sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)));
    const double a = 6.0 + 8.0 / sqrt_beta1 * (2.0 / sqrt_beta1 + std::sqrt(1.0 + 4.0 / (sqrt_beta1 * sqrt_beta1)));
    const double term1 = 1.0 - 2.0 / (9.0 * a);
    const double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
    if (denom == 0.0) return out;
    const double term2 = std::copysign(std::cbrt((1.0 - 2.0 / a) / std::fabs(denom)), denom);
    const double z_kurt = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));

    const double k2 = z_skew * z_skew + z_kurt * z_kurt;
    out.statistic = k2;
    out.p_value = std::exp(-0.5 * k2);
    return out;
}

std::size_t outlier_check(std::span<const double> values) {
    if (values.size() < 4) fail(ErrorCode::TooFewSamples, "outlier check needs at least 4 observations");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double q1 = quantile_linear(sorted, 0.25);
    const double q3 = quantile_linear(sorted, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - 1.5 * iqr;
    const double hi = q3 + 1.5 * iqr;
    return static_cast<std::size_t>(
        std::count_if(sorted.begin(), sorted.end(), [&](double v) { return v < lo || v > hi; }));
}

DiagnosticReport diagnose(std::span<const double> diffs) {
    DiagnosticReport rep;
    rep.normality_p = normality_check(diffs).p_value;
    if (diffs.size() >= 4) rep.n_outliers = outlier_check(diffs);
    const bool normal_ok = rep.normality_p && *rep.normality_p > 0.05;
    const bool no_outliers = rep.n_outliers && *rep.n_outliers == 0;
    rep.recommendation = (normal_ok && no_outliers && diffs.size() >= kNormalityMinN) ? Recommendation::TTest
                                                                                       : Recommendation::Wilcoxon;
    return rep;
}

}  // namespace falsifier
