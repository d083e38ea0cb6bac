#pragma once

// Pre-registered test plans: an ordered family of falsification hypotheses
// run against one dataset, then decided jointly under a correction policy.

#include <optional>
#include <string>
#include <vector>

#include "falsifier/dataset.hpp"
#include "falsifier/falsify.hpp"
#include "falsifier/mht.hpp"

namespace falsifier {

struct PlannedHypothesis {
    std::string label;
    std::vector<std::string> permissibles;  // one runs the single-proxy test
    std::string impermissible;
    FalsificationConfig config;
};

struct TestPlan {
    std::vector<PlannedHypothesis> hypotheses;
    double alpha = 0.05;
    PlanPolicy policy = PlanPolicy::SequentialBonferroni;

    // EmptyPlan for no hypotheses; ConfigError for duplicate labels, a bad
    // alpha, or a hypothesis without permissible outcomes.
    void validate() const;
};

struct PlanRun {
    PlanResult result;
    // One entry per hypothesis in plan order. A hypothesis whose test hit a
    // numeric failure has no report, an error message, and p = 1.
    std::vector<std::optional<FalsificationReport>> reports;
    std::vector<std::string> errors;
};

// Runs every hypothesis in declared order, then applies the plan's policy.
// The plan's alpha replaces each hypothesis config's alpha.
PlanRun execute_plan(const TestPlan& plan, const EvalDataset& dataset);

}  // namespace falsifier
