#include "falsifier/mht.hpp"

#include <algorithm>
#include <numeric>

#include "falsifier/error.hpp"

namespace falsifier {

std::string_view to_string(Correction c) noexcept { return c == Correction::Bonferroni ? "bonferroni" : "holm"; }

std::string_view to_string(PlanPolicy p) noexcept {
    switch (p) {
        case PlanPolicy::SequentialBonferroni: return "sequential_bonferroni";
        case PlanPolicy::SequentialHolm: return "sequential_holm";
        case PlanPolicy::Bonferroni: return "bonferroni";
        case PlanPolicy::Holm: return "holm";
    }
    return "sequential_bonferroni";
}

PlanPolicy parse_plan_policy(std::string_view text) {
    for (auto p : {PlanPolicy::SequentialBonferroni, PlanPolicy::SequentialHolm, PlanPolicy::Bonferroni,
                   PlanPolicy::Holm}) {
        if (text == to_string(p)) return p;
    }
    fail(ErrorCode::ConfigError, "unknown plan policy '" + std::string(text) + "'");
}

namespace {

void check_inputs(std::span<const double> pvalues, double alpha) {
    if (pvalues.empty()) fail(ErrorCode::EmptyPlan, "no hypotheses to decide");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorCode::ConfigError, "alpha must lie in [0, 1]");
    for (double p : pvalues) {
        if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::ConfigError, "p-values must lie in [0, 1]");
    }
}

struct Thresholded {
    std::vector<bool> rejected;
    std::vector<double> thresholds;
};

Thresholded bonferroni_detail(std::span<const double> p, double alpha) {
    Thresholded out;
    const double t = alpha / static_cast<double>(p.size());
    for (double v : p) {
        out.rejected.push_back(v <= t);
        out.thresholds.push_back(t);
    }
    return out;
}

Thresholded holm_detail(std::span<const double> p, double alpha) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    Thresholded out;
    out.rejected.assign(m, false);
    out.thresholds.assign(m, 0.0);
    bool stopped = false;
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t idx = order[k];
        const double t = alpha / static_cast<double>(m - k);
        out.thresholds[idx] = t;
        if (!stopped && p[idx] <= t) {
            out.rejected[idx] = true;
        } else {
            stopped = true;
        }
    }
    return out;
}

std::string label_at(std::span<const std::string> labels, std::size_t i) {
    return i < labels.size() ? labels[i] : "H" + std::to_string(i + 1);
}

}  // namespace

std::vector<bool> bonferroni(std::span<const double> pvalues, double alpha) {
    check_inputs(pvalues, alpha);
    return bonferroni_detail(pvalues, alpha).rejected;
}

std::vector<bool> holm(std::span<const double> pvalues, double alpha) {
    check_inputs(pvalues, alpha);
    return holm_detail(pvalues, alpha).rejected;
}

PlanResult sequential_decide(std::span<const double> pvalues_in_order, double alpha, Correction correction,
                             std::span<const std::string> labels) {
    check_inputs(pvalues_in_order, alpha);
    PlanResult res;
    res.family_alpha = alpha;
    res.policy = correction == Correction::Bonferroni ? PlanPolicy::SequentialBonferroni : PlanPolicy::SequentialHolm;
    const std::size_t total = pvalues_in_order.size();

    std::size_t k = 0;
    for (; k < total; ++k) {
        const double p = pvalues_in_order[k];
        if (p > alpha) break;
        res.decisions.push_back({label_at(labels, k), p, alpha, true, "sequential"});
    }
    if (k == total) return res;

    const auto rest = pvalues_in_order.subspan(k);
    const Thresholded t =
        correction == Correction::Bonferroni ? bonferroni_detail(rest, alpha) : holm_detail(rest, alpha);
    for (std::size_t r = 0; r < rest.size(); ++r) {
        res.decisions.push_back({label_at(labels, k + r), rest[r], t.thresholds[r], t.rejected[r],
                                 std::string(to_string(correction))});
    }
    return res;
}

PlanResult decide_plan(std::span<const double> pvalues_in_order, double alpha, PlanPolicy policy,
                       std::span<const std::string> labels) {
    switch (policy) {
        case PlanPolicy::SequentialBonferroni:
            return sequential_decide(pvalues_in_order, alpha, Correction::Bonferroni, labels);
        case PlanPolicy::SequentialHolm:
            return sequential_decide(pvalues_in_order, alpha, Correction::Holm, labels);
        case PlanPolicy::Bonferroni:
        case PlanPolicy::Holm: {
            check_inputs(pvalues_in_order, alpha);
            const Thresholded t = policy == PlanPolicy::Bonferroni ? bonferroni_detail(pvalues_in_order, alpha)
                                                                    : holm_detail(pvalues_in_order, alpha);
            PlanResult res;
            res.family_alpha = alpha;
            res.policy = policy;
            for (std::size_t i = 0; i < pvalues_in_order.size(); ++i) {
                res.decisions.push_back({label_at(labels, i), pvalues_in_order[i], t.thresholds[i], t.rejected[i],
                                         std::string(to_string(policy))});
            }
            return res;
        }
    }
    fail(ErrorCode::InternalError, "unhandled plan policy");
}

}  // namespace falsifier
