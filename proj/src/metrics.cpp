#include "falsifier/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "falsifier/error.hpp"

namespace falsifier {

namespace {

void check_lengths(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) fail(ErrorCode::InternalError, "scores and labels differ in length");
    if (scores.empty()) fail(ErrorCode::EmptyDataset, "metric over an empty sample");
}

std::pair<std::size_t, std::size_t> class_counts(std::span<const std::uint8_t> labels) {
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    return {pos, labels.size() - pos};
}

// Indices by descending score, stable in record order.
std::vector<std::size_t> descending_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

std::string fmt(double v, const char* spec = "%.4f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::string k_label(double k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", k);
    return buf;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    check_lengths(scores, labels);
    const auto [n_pos, n_neg] = class_counts(labels);
    if (n_pos == 0 || n_neg == 0) fail(ErrorCode::SingleClassLabels, "AUC needs both label values");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Walk tie groups in ascending score order.
    double correct = 0.0;
    std::size_t neg_below = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t pos_here = 0, neg_here = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] ? pos_here : neg_here) += 1;
            ++j;
        }
        correct += static_cast<double>(pos_here) * (static_cast<double>(neg_below) + 0.5 * static_cast<double>(neg_here));
        neg_below += neg_here;
        i = j;
    }
    return correct / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double au_pr(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    check_lengths(scores, labels);
    const auto [n_pos, n_neg] = class_counts(labels);
    if (n_pos == 0 || n_neg == 0) fail(ErrorCode::SingleClassLabels, "AU-PR needs both label values");

    const auto order = descending_order(scores);
    double ap = 0.0;
    std::size_t tp = 0, fp = 0;
    double prev_recall = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] ? tp : fp) += 1;
            ++j;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

double mse(std::span<const double> probabilities, std::span<const std::uint8_t> labels) {
    check_lengths(probabilities, labels);
    double s = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double d = probabilities[i] - static_cast<double>(labels[i]);
        s += d * d;
    }
    return s / static_cast<double>(labels.size());
}

std::size_t top_k_count(std::size_t n, double k_percent) {
    if (!(k_percent > 0.0 && k_percent <= 100.0))
        fail(ErrorCode::InvalidK, "k must lie in (0, 100], got " + k_label(k_percent));
    const double x = k_percent * static_cast<double>(n) / 100.0;
    // Guard against k*n/100 landing a hair above an integer.
    const auto c = static_cast<std::size_t>(std::ceil(x - 1e-9));
    return std::clamp<std::size_t>(c, 1, n);
}

double ppv_at_top_k(std::span<const double> scores, std::span<const std::uint8_t> labels, double k_percent) {
    check_lengths(scores, labels);
    const std::size_t sel = top_k_count(scores.size(), k_percent);
    const auto order = descending_order(scores);
    std::size_t pos = 0;
    for (std::size_t r = 0; r < sel; ++r) pos += labels[order[r]];
    return static_cast<double>(pos) / static_cast<double>(sel);
}

double tnr_at_top_k(std::span<const double> scores, std::span<const std::uint8_t> labels, double k_percent) {
    check_lengths(scores, labels);
    const std::size_t sel = top_k_count(scores.size(), k_percent);
    const auto [n_pos, n_neg] = class_counts(labels);
    if (n_neg == 0) fail(ErrorCode::SingleClassLabels, "TNR needs at least one negative");
    const auto order = descending_order(scores);
    std::size_t neg_outside = 0;
    for (std::size_t r = sel; r < order.size(); ++r) neg_outside += labels[order[r]] == 0 ? 1 : 0;
    return static_cast<double>(neg_outside) / static_cast<double>(n_neg);
}

MetricTable metric_table(const EvalDataset& dataset, const std::map<std::string, std::vector<double>>& predictions,
                         const MetricOptions& options, std::string prediction_source) {
    for (double k : options.ppv_ks) top_k_count(1, k);
    for (double k : options.tnr_ks) top_k_count(1, k);

    const auto rows = dataset.indices(SplitRole::Evaluation);
    std::vector<double> scores;
    scores.reserve(rows.size());
    for (std::size_t i : rows) scores.push_back(dataset.scores()[i]);

    MetricTable table;
    table.ppv_ks = options.ppv_ks;
    table.tnr_ks = options.tnr_ks;
    table.prediction_source = std::move(prediction_source);
    for (std::size_t j = 0; j < dataset.outcome_count(); ++j) {
        const auto& spec = dataset.outcomes()[j];
        const auto all = dataset.labels(j);
        std::vector<std::uint8_t> labels;
        labels.reserve(rows.size());
        for (std::size_t i : rows) labels.push_back(all[i]);

        MetricRow row;
        row.outcome = spec.name;
        row.role = spec.role;
        row.auc = auc(scores, labels);
        row.au_pr = au_pr(scores, labels);
        if (const auto it = predictions.find(spec.name); it != predictions.end()) {
            const auto& p = it->second;
            if (p.size() != labels.size())
                fail(ErrorCode::InternalError, "predictions for '" + spec.name + "' are misaligned");
            if (std::all_of(p.begin(), p.end(), [](double v) { return v >= 0.0 && v <= 1.0; }))
                row.mse = mse(p, labels);
        }
        for (double k : options.ppv_ks) row.ppv.emplace_back(k, ppv_at_top_k(scores, labels, k));
        for (double k : options.tnr_ks) row.tnr.emplace_back(k, tnr_at_top_k(scores, labels, k));
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_metric_csv(std::ostream& out, const MetricTable& table) {
    out << "outcome,role,auc,au_pr,mse";
    for (double k : table.ppv_ks) out << ",ppv_top_" << k_label(k);
    for (double k : table.tnr_ks) out << ",tnr_top_" << k_label(k);
    out << '\n';
    for (const auto& r : table.rows) {
        out << r.outcome << ',' << to_string(r.role) << ',' << fmt(r.auc, "%.17g") << ',' << fmt(r.au_pr, "%.17g")
            << ',' << (r.mse ? fmt(*r.mse, "%.17g") : "");
        for (const auto& [k, v] : r.ppv) out << ',' << fmt(v, "%.17g");
        for (const auto& [k, v] : r.tnr) out << ',' << fmt(v, "%.17g");
        out << '\n';
    }
}

void write_metric_text(std::ostream& out, const MetricTable& table) {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"Outcome", "Role", "AUC", "AU PR", "MSE"};
    for (double k : table.ppv_ks) header.push_back("PPV Top " + k_label(k) + "%");
    for (double k : table.tnr_ks) header.push_back("TNR Top " + k_label(k) + "%");
    cells.push_back(header);
    for (const auto& r : table.rows) {
        std::vector<std::string> line{r.outcome,
                                      r.role == OutcomeRole::Impermissible ? "IMPERMISSIBLE" : "permissible",
                                      fmt(r.auc), fmt(r.au_pr), r.mse ? fmt(*r.mse) : "-"};
        for (const auto& [k, v] : r.ppv) line.push_back(fmt(v));
        for (const auto& [k, v] : r.tnr) line.push_back(fmt(v));
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells)
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c) out << "  ";
            if (c < 2) {
                out << line[c] << std::string(width[c] - line[c].size(), ' ');
            } else {
                out << std::string(width[c] - line[c].size(), ' ') << line[c];
            }
        }
        out << '\n';
    }
}

}  // namespace falsifier
