#pragma once

// Error reporting for the falsifier library.
//
// Every failure raised by the library is a falsifier::Error carrying an
// ErrorCode. The CLI maps codes to exit statuses: numeric failures (a test
// that cannot be computed on the supplied data) exit 1, everything else
// (usage, configuration, malformed input) exits 2.

#include <stdexcept>
#include <string>
#include <string_view>

namespace falsifier {

enum class ErrorCode {
    // dataset
    MissingColumn,
    MissingCell,
    NonBinaryLabel,
    NonFiniteScore,
    MalformedScore,
    EmptyDataset,
    SplitTooSmall,
    DegenerateCalibrationLabels,
    // calibration / metrics
    SingleClassLabels,
    NoConvergence,
    MissingCalibration,
    InvalidK,
    // stat_core
    DegenerateVariance,
    TooFewSamples,
    AllZeroDifferences,
    // falsify / mht / simharness
    ConfigError,
    PermutationBudgetTooSmall,
    EmptyPlan,
    NonExchangeableSpec,
    // plumbing
    IoError,
    ParseError,
    InternalError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

// True for failures that come from the data itself rather than from how the
// tool was invoked.
bool is_numeric_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace falsifier
