#include "falsifier/plan.hpp"

#include <set>

#include "falsifier/error.hpp"

namespace falsifier {

void TestPlan::validate() const {
    if (hypotheses.empty()) fail(ErrorCode::EmptyPlan, "test plan declares no hypotheses");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::ConfigError, "plan alpha must lie in (0, 1)");
    std::set<std::string> seen;
    for (const auto& h : hypotheses) {
        if (h.label.empty()) fail(ErrorCode::ConfigError, "hypothesis label must not be empty");
        if (!seen.insert(h.label).second) fail(ErrorCode::ConfigError, "duplicate hypothesis label '" + h.label + "'");
        if (h.permissibles.empty())
            fail(ErrorCode::ConfigError, "hypothesis '" + h.label + "' needs at least one permissible outcome");
        if (h.impermissible.empty())
            fail(ErrorCode::ConfigError, "hypothesis '" + h.label + "' needs an impermissible outcome");
    }
}

PlanRun execute_plan(const TestPlan& plan, const EvalDataset& dataset) {
    plan.validate();
    PlanRun run;
    std::vector<double> pvalues;
    std::vector<std::string> labels;
    for (const auto& h : plan.hypotheses) {
        FalsificationConfig cfg = h.config;
        cfg.alpha = plan.alpha;
        labels.push_back(h.label);
        try {
            auto rep = h.permissibles.size() == 1
                           ? run_single_proxy(dataset, h.permissibles.front(), h.impermissible, cfg)
                           : run_multi_proxy(dataset, h.permissibles, h.impermissible, cfg);
            pvalues.push_back(rep.test.p_value);
            run.reports.emplace_back(std::move(rep));
            run.errors.emplace_back();
        } catch (const Error& e) {
            if (!is_numeric_failure(e.code())) throw;
            pvalues.push_back(1.0);
            run.reports.emplace_back(std::nullopt);
            run.errors.push_back(std::string(error_code_name(e.code())) + ": " + e.what());
        }
    }
    run.result = decide_plan(pvalues, plan.alpha, plan.policy, labels);
    return run;
}

}  // namespace falsifier
