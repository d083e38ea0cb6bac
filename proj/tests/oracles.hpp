#pragma once

// Reference implementations used only by the tests. Each one follows the
// textbook definition directly (enumeration, pairwise counting, bisection)
// and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// Average ranks (1-based) by sorting value/index pairs.
inline std::vector<double> tie_ranks(const std::vector<double>& v) {
    std::vector<std::pair<double, std::size_t>> pairs;
    for (std::size_t i = 0; i < v.size(); ++i) pairs.push_back({v[i], i});
    std::sort(pairs.begin(), pairs.end());
    std::vector<double> out(v.size());
    std::size_t i = 0;
    while (i < pairs.size()) {
        std::size_t j = i;
        while (j < pairs.size() && pairs[j].first == pairs[i].first) ++j;
        const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) out[pairs[k].second] = r;
        i = j;
    }
    return out;
}

// One-sided (greater) exact Wilcoxon p-value by enumerating all 2^n sign
// patterns of the non-zero differences. Doubled ranks keep sums integral.
inline double wilcoxon_enumerated_p(const std::vector<double>& diffs) {
    std::vector<double> abs_nz;
    std::vector<int> sign;
    for (double d : diffs) {
        if (d == 0.0) continue;
        abs_nz.push_back(std::fabs(d));
        sign.push_back(d > 0 ? 1 : -1);
    }
    const std::size_t n = abs_nz.size();
    const auto ranks = tie_ranks(abs_nz);
    std::vector<long> r2(n);
    for (std::size_t i = 0; i < n; ++i) r2[i] = std::lround(2.0 * ranks[i]);
    long observed = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (sign[i] > 0) observed += r2[i];
    std::uint64_t count = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        long t = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask >> i & 1U) t += r2[i];
        if (t >= observed) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(total);
}

// Probability that a random positive outranks a random negative, ties 1/2.
inline double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!y[i]) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j]) continue;
            den += 1.0;
            if (s[i] > s[j]) num += 1.0;
            else if (s[i] == s[j]) num += 0.5;
        }
    }
    return num / den;
}

// Average precision over distinct score thresholds: sum of
// (recall_k - recall_{k-1}) * precision_k, thresholds visited high to low.
inline double threshold_average_precision(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
    std::vector<double> thresholds = s;
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    double ap = 0.0, prev_recall = 0.0;
    for (double t : thresholds) {
        double tp = 0.0, sel = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] >= t) {
                sel += 1.0;
                tp += y[i];
            }
        }
        const double recall = tp / pos;
        ap += (recall - prev_recall) * (tp / sel);
        prev_recall = recall;
    }
    return ap;
}

// Type-7 sample quantile from its definition.
inline double quantile7(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double h = (static_cast<double>(v.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Logistic MLE for p = 1 / (1 + exp(a*s + b)) with fixed targets t, by
// nested bisection: the inner solve finds b*(a) from the intercept score
// equation, the outer one finds the root of the profile score in a. Both
// score functions are monotone, so bisection is guaranteed to converge.
struct LogisticFit {
    double a = 0.0;
    double b = 0.0;
};

inline double inv_one_plus_exp(double z) {
    return z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

inline double profile_b(const std::vector<double>& s, const std::vector<double>& t, double a) {
    // sum(t - p) increases with b.
    auto g = [&](double b) {
        double r = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) r += t[i] - inv_one_plus_exp(a * s[i] + b);
        return r;
    };
    double lo = -60.0, hi = 60.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

inline LogisticFit reference_logistic_mle(const std::vector<double>& s, const std::vector<double>& t) {
    auto ga = [&](double a) {
        const double b = profile_b(s, t, a);
        double r = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) r += (t[i] - inv_one_plus_exp(a * s[i] + b)) * s[i];
        return r;
    };
    double lo = -60.0, hi = 60.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ga(mid) > 0 ? hi : lo) = mid;
    }
    LogisticFit f;
    f.a = 0.5 * (lo + hi);
    f.b = profile_b(s, t, f.a);
    return f;
}

// Holm from its step-down definition: H_(i) is rejected iff every
// p_(j), j <= i, clears alpha / (m - j + 1). Stable in input order on ties.
inline std::vector<bool> holm_stepdown(const std::vector<double>& p, double alpha) {
    const std::size_t m = p.size();
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::vector<bool> out(m, false);
    for (std::size_t k = 0; k < m; ++k) {
        if (p[idx[k]] > alpha / static_cast<double>(m - k)) break;
        out[idx[k]] = true;
    }
    return out;
}

// Exact within-row permutation p-value of the mean impermissible rank by
// enumerating every choice of slot per row; (M+1)^n assignments.
inline double exhaustive_rank_p(const std::vector<std::vector<double>>& row_ranks, std::size_t imp) {
    const std::size_t n = row_ranks.size();
    const std::size_t k = row_ranks.front().size();
    long observed = 0;
    for (const auto& r : row_ranks) observed += std::lround(2.0 * r[imp]);
    std::vector<std::size_t> choice(n, 0);
    std::uint64_t hits = 0, total = 0;
    while (true) {
        long sum = 0;
        for (std::size_t i = 0; i < n; ++i) sum += std::lround(2.0 * row_ranks[i][choice[i]]);
        ++total;
        if (sum >= observed) ++hits;
        std::size_t pos = 0;
        while (pos < n && ++choice[pos] == k) choice[pos++] = 0;
        if (pos == n) break;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace oracle
