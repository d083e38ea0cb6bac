#include "falsifier/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "falsifier/error.hpp"
#include "falsifier/random.hpp"

namespace falsifier {

namespace {

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

std::vector<std::string> permissible_names(const SyntheticSpec& spec) {
    std::vector<std::string> out;
    for (const auto& o : spec.outcomes)
        if (o.role == OutcomeRole::Permissible) out.push_back(o.name);
    return out;
}

std::string impermissible_name(const SyntheticSpec& spec) {
    for (const auto& o : spec.outcomes)
        if (o.role == OutcomeRole::Impermissible) return o.name;
    fail(ErrorCode::ConfigError, "synthetic spec has no impermissible outcome");
}

ExperimentResult run_experiment(const SyntheticSpec& spec, ExperimentProcedure procedure, std::size_t trials,
                                double alpha, const FalsificationConfig& base, unsigned threads) {
    spec.validate();
    if (trials < kMinTrials)
        fail(ErrorCode::ConfigError, "experiments need at least " + std::to_string(kMinTrials) + " trials");
    if (!(alpha >= 0.0 && alpha < 1.0)) fail(ErrorCode::ConfigError, "alpha must lie in [0, 1)");

    ExperimentResult res;
    res.procedure = procedure;
    res.trials = trials;
    res.alpha = alpha;
    res.trial_seeds.resize(trials);
    res.p_values.assign(trials, 1.0);
    std::vector<std::uint8_t> uncomputable(trials, 0);
    for (std::size_t t = 0; t < trials; ++t) res.trial_seeds[t] = derive_seed(spec.seed, StreamTag::Trial, t);

    FalsificationConfig cfg = base;
    cfg.threads = 1;
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            try {
                res.p_values[t] = run_trial(spec, procedure, cfg, res.trial_seeds[t]);
            } catch (const Error& e) {
                if (!is_numeric_failure(e.code()) && e.code() != ErrorCode::DegenerateCalibrationLabels) throw;
                uncomputable[t] = 1;
            }
        }
    };

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));
    if (workers <= 1) {
        work(0, trials);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        const std::size_t chunk = (trials + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(trials, w * chunk);
            const std::size_t end = std::min(trials, begin + chunk);
            pool.emplace_back([&, w, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (std::size_t t = 0; t < trials; ++t) {
        if (res.p_values[t] <= alpha) ++res.rejections;
        res.uncomputable_trials += uncomputable[t];
    }
    res.rejection_rate = static_cast<double>(res.rejections) / static_cast<double>(trials);
    res.mean_p = std::accumulate(res.p_values.begin(), res.p_values.end(), 0.0) / static_cast<double>(trials);
    return res;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n < 10) fail(ErrorCode::ConfigError, "synthetic spec needs n >= 10");
    if (n_calibration < 2) fail(ErrorCode::ConfigError, "synthetic spec needs n_calibration >= 2");
    std::size_t imp = 0, perm = 0;
    for (const auto& o : outcomes) {
        if (!std::isfinite(o.slope) || !std::isfinite(o.intercept))
            fail(ErrorCode::ConfigError, "link parameters for '" + o.name + "' must be finite");
        (o.role == OutcomeRole::Impermissible ? imp : perm) += 1;
    }
    if (imp != 1) fail(ErrorCode::ConfigError, "synthetic spec needs exactly one impermissible outcome");
    if (perm == 0) fail(ErrorCode::ConfigError, "synthetic spec needs at least one permissible outcome");
}

bool SyntheticSpec::exchangeable() const noexcept {
    return std::all_of(outcomes.begin(), outcomes.end(), [&](const OutcomeLink& o) {
        return o.slope == outcomes.front().slope && o.intercept == outcomes.front().intercept;
    });
}

EvalDataset generate(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t total = spec.n + spec.n_calibration;
    auto rng = make_stream(spec.seed, StreamTag::Generate, 0);
    std::normal_distribution<double> normal(0.0, 1.0);

    std::vector<double> scores(total);
    std::vector<std::vector<std::uint8_t>> labels(spec.outcomes.size(), std::vector<std::uint8_t>(total));
    for (std::size_t i = 0; i < total; ++i) {
        const double s = normal(rng);
        scores[i] = spec.transform == ScoreTransform::Logistic ? sigmoid(s) : s;
        for (std::size_t j = 0; j < spec.outcomes.size(); ++j) {
            const auto& link = spec.outcomes[j];
            labels[j][i] = uniform_unit(rng) < sigmoid(link.slope * s + link.intercept) ? 1 : 0;
        }
    }
    std::vector<OutcomeSpec> outcomes;
    for (const auto& o : spec.outcomes) outcomes.push_back({o.name, o.role});
    std::vector<SplitRole> roles(total, SplitRole::Evaluation);
    std::fill_n(roles.begin(), spec.n_calibration, SplitRole::Calibration);
    return EvalDataset(std::move(scores), std::move(outcomes), std::move(labels), std::move(roles));
}

std::string_view to_string(ExperimentProcedure p) noexcept {
    switch (p) {
        case ExperimentProcedure::Alg1: return "alg1";
        case ExperimentProcedure::Alg2Permutation: return "alg2_perm";
        case ExperimentProcedure::Alg2Normal: return "alg2_normal";
    }
    return "alg1";
}

ExperimentProcedure parse_experiment_procedure(std::string_view text) {
    for (auto p : {ExperimentProcedure::Alg1, ExperimentProcedure::Alg2Permutation, ExperimentProcedure::Alg2Normal}) {
        if (text == to_string(p)) return p;
    }
    fail(ErrorCode::ConfigError, "unknown procedure '" + std::string(text) + "' (alg1, alg2_perm, alg2_normal)");
}

double run_trial(const SyntheticSpec& spec, ExperimentProcedure procedure, const FalsificationConfig& base,
                 std::uint64_t trial_seed) {
    SyntheticSpec s = spec;
    s.seed = trial_seed;
    const EvalDataset data = generate(s);
    FalsificationConfig cfg = base;
    cfg.seed = trial_seed;
    const auto perms = permissible_names(spec);
    const auto imp = impermissible_name(spec);
    switch (procedure) {
        case ExperimentProcedure::Alg1:
            return run_single_proxy(data, perms.front(), imp, cfg).test.p_value;
        case ExperimentProcedure::Alg2Permutation:
            cfg.multi_proxy_mode = MultiProxyMode::Permutation;
            return run_multi_proxy(data, perms, imp, cfg).test.p_value;
        case ExperimentProcedure::Alg2Normal:
            cfg.multi_proxy_mode = MultiProxyMode::Normal;
            return run_multi_proxy(data, perms, imp, cfg).test.p_value;
    }
    fail(ErrorCode::InternalError, "unhandled procedure");
}

ExperimentResult type1_experiment(const SyntheticSpec& spec, ExperimentProcedure procedure, std::size_t trials,
                                  double alpha, const FalsificationConfig& base, unsigned threads) {
    if (!spec.exchangeable())
        fail(ErrorCode::NonExchangeableSpec, "Type-I experiments need identical links for every outcome");
    return run_experiment(spec, procedure, trials, alpha, base, threads);
}

ExperimentResult power_experiment(const SyntheticSpec& spec, ExperimentProcedure procedure, std::size_t trials,
                                  double alpha, const FalsificationConfig& base, unsigned threads) {
    return run_experiment(spec, procedure, trials, alpha, base, threads);
}

std::vector<AblationRow> ablation_run(const EvalDataset& dataset, const std::vector<std::string>& permissibles,
                                      const std::string& impermissible, const FalsificationConfig& base) {
    if (permissibles.empty()) fail(ErrorCode::ConfigError, "ablation needs at least one permissible outcome");
    std::vector<AblationRow> rows;
    for (bool calibrate : {true, false}) {
        for (LossKind kind : {LossKind::LogLoss, LossKind::Brier}) {
            AblationRow row;
            row.calibrate = calibrate;
            row.loss = kind;
            FalsificationConfig cfg = base;
            cfg.calibrate = calibrate;
            cfg.loss_kind = kind;
            try {
                if (permissibles.size() == 1) {
                    const auto rep = run_single_proxy(dataset, permissibles.front(), impermissible, cfg);
                    row.summary = rep.diff_summary->mean;
                    row.p_value = rep.test.p_value;
                    row.verdict = rep.verdict;
                } else {
                    const auto rep = run_multi_proxy(dataset, permissibles, impermissible, cfg);
                    row.summary = rep.rank_summary->mean_rank;
                    row.p_value = rep.test.p_value;
                    row.verdict = rep.verdict;
                }
            } catch (const Error& e) {
                row.error = std::string(error_code_name(e.code())) + ": " + e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace falsifier
