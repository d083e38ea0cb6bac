#pragma once

// Per-outcome Platt scaling.
//
// Parameterization follows the sigmoid P(y=1 | s) = 1 / (1 + exp(a*s + b)),
// so a score that rises with the outcome fits a < 0.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>

namespace falsifier {

// Calibrated probabilities are clamped to [eps, 1 - eps] so that log loss is
// always finite.
inline constexpr double kProbabilityEpsilon = 1e-12;

double clamp_probability(double p) noexcept;

struct PlattOptions {
    // Replace 0/1 targets by (N+ + 1)/(N+ + 2) and 1/(N- + 2).
    bool smoothing = true;
    int max_iter = 100;
    // Convergence threshold on the gradient norm of the mean negative
    // log-likelihood.
    double tol = 1e-10;
};

struct PlattParams {
    double a = 0.0;
    double b = 0.0;
    std::string outcome;
    std::size_t n_fit = 0;
    bool smoothing_applied = false;
    int iterations = 0;
};

// Maximum-likelihood fit by damped Newton iteration with an Armijo
// backtracking line search. Throws SingleClassLabels when only one label value
// is present, NoConvergence (message carries the last iterate) when the
// gradient tolerance is not met within max_iter.
PlattParams fit_platt(std::span<const double> scores, std::span<const std::uint8_t> labels,
                      const PlattOptions& options = {}, std::string outcome = {});

// 1 / (1 + exp(a*score + b)), clamped to [eps, 1 - eps].
double apply_platt(const PlattParams& params, double score) noexcept;

// Uncalibrated mode: the raw score is taken as a probability (clamped).
struct IdentityCalibration {
    std::string outcome;
};

using Calibration = std::variant<IdentityCalibration, PlattParams>;

double calibrate(const Calibration& calibration, double score) noexcept;
const std::string& calibration_outcome(const Calibration& calibration) noexcept;

}  // namespace falsifier
