#pragma once

// Standard evaluation metrics per outcome: AUC, AU-PR, MSE, PPV and TNR when
// the top k% of records by score are selected.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "falsifier/dataset.hpp"

namespace falsifier {

// Mann-Whitney form: fraction of positive/negative pairs ordered correctly,
// ties counted one half. SingleClassLabels if a class is absent.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Average precision with step interpolation: sum over distinct score
// thresholds (descending) of (recall gain) * precision.
double au_pr(std::span<const double> scores, std::span<const std::uint8_t> labels);

double mse(std::span<const double> probabilities, std::span<const std::uint8_t> labels);

// ceil(k * n / 100) records, k in (0, 100]. InvalidK otherwise.
std::size_t top_k_count(std::size_t n, double k_percent);

// Selection is by descending score, ties broken by record index.
double ppv_at_top_k(std::span<const double> scores, std::span<const std::uint8_t> labels, double k_percent);
// Negatives outside the selection over all negatives.
double tnr_at_top_k(std::span<const double> scores, std::span<const std::uint8_t> labels, double k_percent);

struct MetricOptions {
    std::vector<double> ppv_ks{2, 10, 50, 75};
    std::vector<double> tnr_ks{};
};

struct MetricRow {
    std::string outcome;
    OutcomeRole role = OutcomeRole::Permissible;
    double auc = 0.0;
    double au_pr = 0.0;
    std::optional<double> mse;  // absent when predictions are not probabilities
    std::vector<std::pair<double, double>> ppv;
    std::vector<std::pair<double, double>> tnr;
};

struct MetricTable {
    std::vector<MetricRow> rows;
    std::vector<double> ppv_ks;
    std::vector<double> tnr_ks;
    std::string au_pr_method = "average_precision_step";
    std::string prediction_source;  // "calibrated" or "raw"
};

// One row per declared outcome on the evaluation split. Ranking metrics use
// the raw model score; MSE uses `predictions[outcome]`, aligned with the
// evaluation rows.
MetricTable metric_table(const EvalDataset& dataset, const std::map<std::string, std::vector<double>>& predictions,
                         const MetricOptions& options, std::string prediction_source = "calibrated");

void write_metric_csv(std::ostream& out, const MetricTable& table);
// Column-aligned text; impermissible rows marked in the role column.
void write_metric_text(std::ostream& out, const MetricTable& table);

}  // namespace falsifier
