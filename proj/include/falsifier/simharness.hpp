#pragma once

// Synthetic data and Monte-Carlo experiments for checking the procedures'
// error rates and power.
//
// Generator: latent score s ~ N(0, 1); each outcome j is an independent
// Bernoulli draw with P(y_j = 1 | s) = sigmoid(slope_j * s + intercept_j).
// Outcomes are therefore conditionally independent given the score, and
// identical links make the outcome losses exchangeable.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "falsifier/dataset.hpp"
#include "falsifier/falsify.hpp"

namespace falsifier {

enum class ScoreTransform {
    Identity,  // emit s
    Logistic,  // emit sigmoid(s), a probability usable without calibration
};

struct OutcomeLink {
    std::string name;
    OutcomeRole role = OutcomeRole::Permissible;
    double slope = 0.0;
    double intercept = 0.0;
};

struct SyntheticSpec {
    std::size_t n = 200;              // evaluation records
    std::size_t n_calibration = 200;  // calibration records
    std::vector<OutcomeLink> outcomes;
    ScoreTransform transform = ScoreTransform::Identity;
    std::uint64_t seed = 0;

    // ConfigError on n < 10, n_calibration < 2, non-finite links, or missing
    // roles.
    void validate() const;
    bool exchangeable() const noexcept;
};

// Deterministic in spec.seed. The first n_calibration records form the
// calibration split, the rest the evaluation split.
EvalDataset generate(const SyntheticSpec& spec);

enum class ExperimentProcedure { Alg1, Alg2Permutation, Alg2Normal };

std::string_view to_string(ExperimentProcedure p) noexcept;
ExperimentProcedure parse_experiment_procedure(std::string_view text);

struct ExperimentResult {
    ExperimentProcedure procedure = ExperimentProcedure::Alg1;
    std::size_t trials = 0;
    std::size_t rejections = 0;
    double rejection_rate = 0.0;
    double mean_p = 0.0;
    double alpha = 0.05;
    // Trials whose test could not be computed (e.g. all-zero differences)
    // count as non-rejections with p = 1.
    std::size_t uncomputable_trials = 0;
    std::vector<std::uint64_t> trial_seeds;
    std::vector<double> p_values;
};

inline constexpr std::size_t kMinTrials = 100;

// Runs one trial: generate with `trial_seed`, then apply the procedure. Alg1
// uses the first permissible outcome. Returns the p-value.
double run_trial(const SyntheticSpec& spec, ExperimentProcedure procedure, const FalsificationConfig& base,
                 std::uint64_t trial_seed);

// Rejection rate under an exchangeable spec; NonExchangeableSpec otherwise.
// Trial t uses seed derive_seed(spec.seed, Trial, t), so results do not
// depend on `threads`.
ExperimentResult type1_experiment(const SyntheticSpec& spec, ExperimentProcedure procedure, std::size_t trials,
                                  double alpha, const FalsificationConfig& base = {}, unsigned threads = 1);

ExperimentResult power_experiment(const SyntheticSpec& spec, ExperimentProcedure procedure, std::size_t trials,
                                  double alpha, const FalsificationConfig& base = {}, unsigned threads = 1);

struct AblationRow {
    bool calibrate = true;
    LossKind loss = LossKind::LogLoss;
    // Mean loss difference (single proxy) or mean impermissible rank (multi).
    double summary = 0.0;
    double p_value = 1.0;
    Verdict verdict = Verdict::Indiscriminant;
    std::string error;  // set when the cell could not be computed
};

// {calibrate on, off} x {log loss, Brier}: always four rows. A single
// permissible runs the single-proxy procedure, more run the multi-proxy one.
std::vector<AblationRow> ablation_run(const EvalDataset& dataset, const std::vector<std::string>& permissibles,
                                      const std::string& impermissible, const FalsificationConfig& base = {});

}  // namespace falsifier
