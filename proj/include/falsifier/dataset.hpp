#pragma once

// Evaluation data: one raw model score per record plus one binary label per
// declared outcome column, each column tagged permissible or impermissible,
// and an optional calibration/evaluation split.
//
// Storage is column-major. An EvalDataset is immutable after construction;
// split() and select() return new datasets.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace falsifier {

enum class OutcomeRole { Permissible, Impermissible };
enum class SplitRole : std::uint8_t { Calibration, Evaluation };

std::string_view to_string(OutcomeRole role) noexcept;
std::string_view to_string(SplitRole role) noexcept;

struct OutcomeSpec {
    std::string name;
    OutcomeRole role = OutcomeRole::Permissible;

    bool operator==(const OutcomeSpec&) const = default;
};

struct EvalRecord {
    double score = 0.0;
    std::map<std::string, std::uint8_t> labels;
};

class EvalDataset {
public:
    EvalDataset() = default;

    // Validates: equal column lengths, finite scores, labels in {0,1}, unique
    // outcome names, at least one permissible and one impermissible outcome.
    // An empty split vector means "not yet split".
    EvalDataset(std::vector<double> scores, std::vector<OutcomeSpec> outcomes,
                std::vector<std::vector<std::uint8_t>> labels,
                std::vector<SplitRole> split = {});

    std::size_t size() const noexcept { return scores_.size(); }
    std::size_t outcome_count() const noexcept { return outcomes_.size(); }

    std::span<const double> scores() const noexcept { return scores_; }
    const std::vector<OutcomeSpec>& outcomes() const noexcept { return outcomes_; }
    std::span<const std::uint8_t> labels(std::size_t outcome) const;
    std::span<const std::uint8_t> labels(std::string_view name) const;

    // Throws ConfigError naming the outcome when it is not declared.
    std::size_t outcome_index(std::string_view name) const;
    bool has_outcome(std::string_view name) const noexcept;

    EvalRecord record(std::size_t i) const;

    bool is_split() const noexcept { return !split_.empty(); }
    std::span<const SplitRole> split_assignment() const noexcept { return split_; }
    // Row indices of one split role, in dataset order.
    std::vector<std::size_t> indices(SplitRole role) const;

    // Same data, new assignment. Enforces the split invariants: both roles
    // hold at least two records and every outcome has both label values in
    // the calibration rows.
    EvalDataset with_split(std::vector<SplitRole> split) const;

    // View restricted to the outcomes of one falsification run, with roles
    // rewritten so exactly `impermissible` is impermissible. Column order is
    // impermissible first, then permissibles in the order given.
    EvalDataset select(std::span<const std::string> permissibles,
                       std::string_view impermissible) const;

    // Index of the single impermissible column; ConfigError if there is not
    // exactly one.
    std::size_t impermissible_index() const;

    // Content hash over outcomes, scores, labels and split assignment.
    std::string fingerprint() const;

private:
    std::vector<double> scores_;
    std::vector<OutcomeSpec> outcomes_;
    std::vector<std::vector<std::uint8_t>> labels_;
    std::vector<SplitRole> split_;
};

struct LabelTokens {
    std::vector<std::string> true_tokens{"1", "true"};
    std::vector<std::string> false_tokens{"0", "false"};
};

struct CsvLoadOptions {
    std::string score_col;
    std::vector<OutcomeSpec> outcomes;
    // Optional column holding "calibration"/"evaluation" per row. When set
    // the file's split is used instead of random splitting.
    std::optional<std::string> role_col;
    LabelTokens tokens;
};

// RFC-4180 CSV: header row, comma separator, double-quote quoting with ""
// escapes, quoted fields may span lines, CRLF or LF line endings. Lines
// starting with "#" before the header are ignored.
std::vector<std::vector<std::string>> parse_csv_rows(std::string_view text);

// Rows with an empty cell in any used column are rejected (MissingCell).
EvalDataset parse_csv(std::string_view text, const CsvLoadOptions& options);
EvalDataset load_csv(const std::filesystem::path& path, const CsvLoadOptions& options);

// Deterministic random split: round(calibration_fraction * n) records go to
// calibration, the rest to evaluation.
EvalDataset split(const EvalDataset& dataset, double calibration_fraction,
                  std::uint64_t seed);

std::string read_file(const std::filesystem::path& path);

}  // namespace falsifier
