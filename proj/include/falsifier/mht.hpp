#pragma once

// Family-wise error control for a pre-registered family of falsification
// hypotheses.
//
// Rejection convention everywhere: reject iff p <= threshold.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace falsifier {

enum class Correction { Bonferroni, Holm };
enum class PlanPolicy { SequentialBonferroni, SequentialHolm, Bonferroni, Holm };

std::string_view to_string(Correction c) noexcept;
std::string_view to_string(PlanPolicy p) noexcept;
PlanPolicy parse_plan_policy(std::string_view text);

struct HypothesisDecision {
    std::string label;
    double p_value = 1.0;
    double threshold = 0.0;
    bool rejected = false;
    // How the decision was reached: "sequential", "bonferroni" or "holm".
    std::string stage;
};

struct PlanResult {
    double family_alpha = 0.05;
    PlanPolicy policy = PlanPolicy::SequentialBonferroni;
    std::vector<HypothesisDecision> decisions;  // plan order
};

// Reject iff p <= alpha/m, m = number of p-values. EmptyPlan on no input.
std::vector<bool> bonferroni(std::span<const double> pvalues, double alpha);

// Step-down Holm: sort ascending (ties stable by input order), reject p_(k)
// while p_(k) <= alpha/(m-k+1), stop at the first failure. Decisions are
// returned in input order.
std::vector<bool> holm(std::span<const double> pvalues, double alpha);

// Sequential testing: hypotheses are tested in order at level alpha while
// they are rejected. At the first non-rejection (position k of K) the
// remaining family {k..K} -- the failed hypothesis plus all untested ones,
// m = K-k+1 -- is decided by the chosen correction. The failed hypothesis
// stays unrejected since its p exceeds alpha >= any corrected threshold.
PlanResult sequential_decide(std::span<const double> pvalues_in_order, double alpha, Correction correction,
                             std::span<const std::string> labels = {});

// Dispatch on a plan policy; plain Bonferroni/Holm correct the whole family.
PlanResult decide_plan(std::span<const double> pvalues_in_order, double alpha, PlanPolicy policy,
                       std::span<const std::string> labels = {});

}  // namespace falsifier
