#include "falsifier/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <cstdio>

#include "falsifier/error.hpp"

namespace falsifier {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) noexcept {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid_neg(double z) noexcept {
    // 1 / (1 + exp(z))
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

struct Problem {
    std::vector<double> x;  // standardized scores
    std::vector<double> t;  // targets

    double objective(double a, double b) const {
        double f = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double z = a * x[i] + b;
            f += softplus(z) - (1.0 - t[i]) * z;
        }
        return f / static_cast<double>(x.size());
    }
};

}  // namespace

double clamp_probability(double p) noexcept {
    return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

PlattParams fit_platt(std::span<const double> scores, std::span<const std::uint8_t> labels,
                      const PlattOptions& options, std::string outcome) {
    if (scores.size() != labels.size())
        fail(ErrorCode::InternalError, "scores and labels differ in length");
    const std::size_t n = scores.size();
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        fail(ErrorCode::SingleClassLabels, "Platt fit for '" + outcome + "' needs both label values");

    if (!options.smoothing) {
        // With hard 0/1 targets, (quasi-)separated classes have no finite MLE;
        // the gradient can still shrink below tol as the slope runs off.
        double pos_min = INFINITY, pos_max = -INFINITY, neg_min = INFINITY, neg_max = -INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
            double& lo = labels[i] ? pos_min : neg_min;
            double& hi = labels[i] ? pos_max : neg_max;
            lo = std::min(lo, scores[i]);
            hi = std::max(hi, scores[i]);
        }
        if (neg_max <= pos_min || pos_max <= neg_min)
            fail(ErrorCode::NoConvergence,
                 "Platt fit for '" + outcome + "' has no finite optimum: scores separate the labels (enable smoothing)");
    }

    // Work on standardized scores for conditioning, map back at the end.
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    double sd = std::sqrt(var / static_cast<double>(n));
    if (!(sd > 0.0)) sd = 1.0;

    const double t_pos = options.smoothing ? (n_pos + 1.0) / (n_pos + 2.0) : 1.0;
    const double t_neg = options.smoothing ? 1.0 / (n_neg + 2.0) : 0.0;

    Problem prob;
    prob.x.resize(n);
    prob.t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        prob.x[i] = (scores[i] - mean) / sd;
        prob.t[i] = labels[i] ? t_pos : t_neg;
    }

    // Start from the intercept-only optimum.
    const double base = std::clamp((n_pos * t_pos + n_neg * t_neg) / static_cast<double>(n), 1e-12, 1.0 - 1e-12);
    double a = 0.0;
    double b = std::log((1.0 - base) / base);
    double f = prob.objective(a, b);
    const double inv_n = 1.0 / static_cast<double>(n);

    for (int iter = 0; iter <= options.max_iter; ++iter) {
        double ga = 0.0, gb = 0.0, haa = 0.0, hab = 0.0, hbb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = prob.x[i];
            const double p = sigmoid_neg(a * x + b);
            const double r = prob.t[i] - p;
            const double w = p * (1.0 - p);
            ga += r * x;
            gb += r;
            haa += w * x * x;
            hab += w * x;
            hbb += w;
        }
        ga *= inv_n;
        gb *= inv_n;
        haa = haa * inv_n + 1e-12;
        hab *= inv_n;
        hbb = hbb * inv_n + 1e-12;

        const double gnorm = std::hypot(ga, gb);
        auto finish = [&] {
            PlattParams out;
            out.a = a / sd;
            out.b = b - a * mean / sd;
            out.outcome = outcome;
            out.n_fit = n;
            out.smoothing_applied = options.smoothing;
            out.iterations = iter;
            return out;
        };
        if (gnorm <= options.tol) return finish();
        if (iter == options.max_iter) break;

        const double det = haa * hbb - hab * hab;
        const double da = -(hbb * ga - hab * gb) / det;
        const double db = -(haa * gb - hab * ga) / det;
        const double slope = ga * da + gb * db;

        // Near the optimum the decrease drops below the rounding of f, so
        // allow a few ulps of slack in the sufficient-decrease test.
        const double slack = 1e-14 * (1.0 + std::abs(f));
        double step = 1.0;
        double f_new = prob.objective(a + da, b + db);
        while (!(f_new <= f + 1e-4 * step * slope + slack) && step > 1e-10) {
            step *= 0.5;
            f_new = prob.objective(a + step * da, b + step * db);
        }
        if (step <= 1e-10) {
            // No decrease is representable: accept only if the Newton step
            // itself is negligible, i.e. we already sit on the optimum.
            if (std::hypot(da, db) <= 1e-9 * (1.0 + std::hypot(a, b))) return finish();
            break;
        }
        a += step * da;
        b += step * db;
        f = f_new;
    }

    char buf[160];
    std::snprintf(buf, sizeof(buf), "Platt fit for '%s' did not converge in %d iterations (last a=%.10g, b=%.10g)",
                  outcome.c_str(), options.max_iter, a / sd, b - a * mean / sd);
    fail(ErrorCode::NoConvergence, buf);
}

double apply_platt(const PlattParams& params, double score) noexcept {
    return clamp_probability(sigmoid_neg(params.a * score + params.b));
}

double calibrate(const Calibration& calibration, double score) noexcept {
    if (const auto* platt = std::get_if<PlattParams>(&calibration)) return apply_platt(*platt, score);
    return clamp_probability(score);
}

const std::string& calibration_outcome(const Calibration& calibration) noexcept {
    return std::visit([](const auto& c) -> const std::string& { return c.outcome; }, calibration);
}

}  // namespace falsifier
