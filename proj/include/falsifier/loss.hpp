#pragma once

// Per-record calibrated losses and the n x (M+1) loss matrix shared by the
// single- and multi-proxy procedures.

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "falsifier/calibration.hpp"
#include "falsifier/dataset.hpp"

namespace falsifier {

enum class LossKind { LogLoss, Brier };

std::string_view to_string(LossKind kind) noexcept;
// Accepts "log", "log_loss", "brier".
LossKind parse_loss_kind(std::string_view text);

// -[y ln p + (1-y) ln(1-p)] with p clamped to [eps, 1-eps].
double log_loss(double p, std::uint8_t y) noexcept;
// (p - y)^2
double brier(double p, std::uint8_t y) noexcept;
double loss(LossKind kind, double p, std::uint8_t y) noexcept;

class LossMatrix {
public:
    LossMatrix(std::size_t rows, std::vector<std::string> outcomes, std::size_t impermissible,
               LossKind kind);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return outcomes_.size(); }
    LossKind kind() const noexcept { return kind_; }
    const std::vector<std::string>& outcomes() const noexcept { return outcomes_; }
    std::size_t impermissible_column() const noexcept { return impermissible_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols() + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols() + j]; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * cols(), cols()};
    }
    std::vector<double> column(std::size_t j) const;

private:
    std::size_t rows_;
    std::vector<std::string> outcomes_;
    std::size_t impermissible_;
    LossKind kind_;
    std::vector<double> values_;
};

// Losses on the evaluation rows of `dataset` (all rows when unsplit), one
// column per declared outcome in declaration order. Every outcome needs an
// entry in `calibrations` (MissingCalibration otherwise). `row_ids` receives
// the dataset index of each matrix row when non-null.
LossMatrix build_loss_matrix(const EvalDataset& dataset,
                             const std::map<std::string, Calibration>& calibrations, LossKind kind,
                             std::vector<std::size_t>* row_ids = nullptr);

// Long format: row_id,outcome,loss
void write_loss_csv(std::ostream& out, const LossMatrix& matrix, std::span<const std::size_t> row_ids);

}  // namespace falsifier
