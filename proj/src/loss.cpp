#include "falsifier/loss.hpp"

#include <cmath>
#include <cstdio>

#include "falsifier/error.hpp"

namespace falsifier {

std::string_view to_string(LossKind kind) noexcept {
    return kind == LossKind::LogLoss ? "log_loss" : "brier";
}

LossKind parse_loss_kind(std::string_view text) {
    if (text == "log" || text == "log_loss") return LossKind::LogLoss;
    if (text == "brier") return LossKind::Brier;
    fail(ErrorCode::ConfigError, "unknown loss '" + std::string(text) + "' (expected log or brier)");
}

double log_loss(double p, std::uint8_t y) noexcept {
    p = clamp_probability(p);
    return y ? -std::log(p) : -std::log1p(-p);
}

double brier(double p, std::uint8_t y) noexcept {
    const double d = p - static_cast<double>(y);
    return d * d;
}

double loss(LossKind kind, double p, std::uint8_t y) noexcept {
    return kind == LossKind::LogLoss ? log_loss(p, y) : brier(p, y);
}

LossMatrix::LossMatrix(std::size_t rows, std::vector<std::string> outcomes, std::size_t impermissible,
                       LossKind kind)
    : rows_(rows),
      outcomes_(std::move(outcomes)),
      impermissible_(impermissible),
      kind_(kind),
      values_(rows * outcomes_.size(), 0.0) {
    if (impermissible_ >= outcomes_.size())
        fail(ErrorCode::InternalError, "impermissible column out of range");
}

std::vector<double> LossMatrix::column(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

LossMatrix build_loss_matrix(const EvalDataset& dataset,
                             const std::map<std::string, Calibration>& calibrations, LossKind kind,
                             std::vector<std::size_t>* row_ids) {
    const auto rows = dataset.indices(SplitRole::Evaluation);
    const auto& outcomes = dataset.outcomes();

    std::vector<std::string> names;
    std::vector<const Calibration*> cals;
    for (const auto& o : outcomes) {
        const auto it = calibrations.find(o.name);
        if (it == calibrations.end())
            fail(ErrorCode::MissingCalibration, "no calibration for outcome '" + o.name + "'");
        names.push_back(o.name);
        cals.push_back(&it->second);
    }

    LossMatrix m(rows.size(), std::move(names), dataset.impermissible_index(), kind);
    const auto scores = dataset.scores();
    for (std::size_t j = 0; j < outcomes.size(); ++j) {
        const auto labels = dataset.labels(j);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::size_t i = rows[r];
            // Clamp re-asserted so uncalibrated 0/1 scores stay finite.
            m(r, j) = loss(kind, clamp_probability(calibrate(*cals[j], scores[i])), labels[i]);
        }
    }
    if (row_ids) *row_ids = rows;
    return m;
}

void write_loss_csv(std::ostream& out, const LossMatrix& matrix, std::span<const std::size_t> row_ids) {
    out << "row_id,outcome,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        for (std::size_t j = 0; j < matrix.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", matrix(i, j));
            out << (i < row_ids.size() ? row_ids[i] : i) << ',' << matrix.outcomes()[j] << ',' << buf << '\n';
        }
    }
}

}  // namespace falsifier
