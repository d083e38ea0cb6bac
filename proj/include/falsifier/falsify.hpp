#pragma once

// End-to-end falsification runs.
//
// Single permissible proxy: calibrate each outcome, take per-record loss
// differences (impermissible minus permissible) on the evaluation split, and
// test H1: E[diff] > 0 with a t-test or a Wilcoxon signed-rank test.
//
// Multiple permissible proxies: rank the M+1 losses within each record
// (rank 1 = lowest loss) and test whether the mean rank of the impermissible
// loss exceeds its exchangeability null (M+2)/2, by within-row permutation
// or by a normal approximation.
//
// DISCRIMINANT is returned iff p <= alpha. INDISCRIMINANT is inconclusive.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "falsifier/calibration.hpp"
#include "falsifier/dataset.hpp"
#include "falsifier/loss.hpp"
#include "falsifier/stat_core.hpp"

namespace falsifier {

enum class Verdict { Discriminant, Indiscriminant };
enum class SingleProxyMode { Auto, TTest, Wilcoxon };
enum class MultiProxyMode { Permutation, Normal };
enum class Procedure { SingleProxy, MultiProxy };

std::string_view to_string(Verdict v) noexcept;
// "DISCRIMINANT" or "INDISCRIMINANT (inconclusive)"
std::string_view verdict_line(Verdict v) noexcept;
std::string_view to_string(SingleProxyMode m) noexcept;
std::string_view to_string(MultiProxyMode m) noexcept;
std::string_view to_string(Procedure p) noexcept;
SingleProxyMode parse_single_proxy_mode(std::string_view text);
MultiProxyMode parse_multi_proxy_mode(std::string_view text);

inline constexpr std::size_t kMinPermutations = 99;

struct FalsificationConfig {
    double alpha = 0.05;
    LossKind loss_kind = LossKind::LogLoss;
    bool calibrate = true;
    PlattOptions platt;
    SingleProxyMode single_proxy_mode = SingleProxyMode::Auto;
    WilcoxonMode wilcoxon_mode = WilcoxonMode::Auto;
    MultiProxyMode multi_proxy_mode = MultiProxyMode::Permutation;
    std::size_t permutations = 9999;
    std::uint64_t seed = 0;
    std::size_t histogram_bins = 30;
    // Worker threads for permutation replicas. Results do not depend on it.
    unsigned threads = 1;

    // ConfigError for alpha outside (0,1); PermutationBudgetTooSmall when a
    // permutation run has B < 99.
    void validate(Procedure procedure) const;
};

struct HistogramBin {
    double left = 0.0;
    double right = 0.0;
    std::size_t count = 0;
};

struct DiffSummary {
    double mean = 0.0;
    double median = 0.0;
    std::size_t n = 0;  // differences entering the histogram (= n_effective)
    std::vector<HistogramBin> bins;
};

struct RankBin {
    int rank = 1;
    double count = 0.0;  // fractional under ties
    double proportion = 0.0;
    double null_expectation = 0.0;
};

struct RankSummary {
    std::size_t m = 0;  // permissible proxies
    double mean_rank = 0.0;
    double null_mean = 0.0;
    std::vector<RankBin> bins;
};

struct FalsificationReport {
    Procedure procedure = Procedure::SingleProxy;
    Verdict verdict = Verdict::Indiscriminant;
    TestResult test;
    std::optional<DiagnosticReport> diagnostics;
    std::optional<DiffSummary> diff_summary;
    std::optional<RankSummary> rank_summary;
    std::vector<Calibration> calibration_audit;
    FalsificationConfig config;
    std::string impermissible;
    std::vector<std::string> permissibles;
    std::size_t n = 0;  // evaluation records
    std::string dataset_fingerprint;
    // Evaluation-split losses, kept for export; not part of the JSON report.
    std::optional<LossMatrix> losses;
    std::vector<std::size_t> loss_row_ids;
};

// Tie-averaged within-row ranks of a loss matrix (rank 1 = lowest loss).
struct RowRanks {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t impermissible = 0;
    std::vector<double> ranks;  // row-major

    double at(std::size_t i, std::size_t j) const noexcept { return ranks[i * cols + j]; }
    double impermissible_rank(std::size_t i) const noexcept { return at(i, impermissible); }
    std::vector<double> impermissible_ranks() const;
};

// Throws InternalError if any row's ranks do not sum to (M+1)(M+2)/2.
RowRanks rank_rows(const LossMatrix& matrix);

// p = (1 + #{Rbar_b >= Rbar_obs}) / (B + 1). Replica b draws from its own
// stream derived from (seed, b).
TestResult rank_permutation_test(const RowRanks& ranks, std::size_t permutations, std::uint64_t seed,
                                 unsigned threads = 1);

// z = (Rbar - (M+2)/2) / sqrt(sum_i Var_i / n^2), Var_i the variance of row
// i's own rank multiset. p = 1 when every row is fully tied.
TestResult rank_normal_test(const RowRanks& ranks);

RankSummary summarize_ranks(const LossMatrix& matrix, const RowRanks& ranks);
DiffSummary summarize_diffs(std::span<const double> all_diffs, std::span<const double> tested,
                            std::size_t bins);

// Platt fit per outcome on the calibration split, or identity calibrations
// when config.calibrate is off (scores must then lie in [0,1]).
std::map<std::string, Calibration> fit_calibrations(const EvalDataset& dataset,
                                                    const FalsificationConfig& config);

FalsificationReport run_single_proxy(const EvalDataset& dataset, const std::string& permissible,
                                     const std::string& impermissible, const FalsificationConfig& config);

FalsificationReport run_multi_proxy(const EvalDataset& dataset, const std::vector<std::string>& permissibles,
                                    const std::string& impermissible, const FalsificationConfig& config);

// rank_histogram.csv (multi-proxy) or diff_histogram.csv (single-proxy).
// `manifest_hash`, when non-empty, is written as a leading "# manifest:" line.
std::vector<std::filesystem::path> emit_plot_data(const FalsificationReport& report,
                                                  const std::filesystem::path& out_dir,
                                                  std::string_view manifest_hash = {});

}  // namespace falsifier
