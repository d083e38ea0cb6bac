#include "falsifier/error.hpp"

namespace falsifier {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::MissingCell: return "MissingCell";
        case ErrorCode::NonBinaryLabel: return "NonBinaryLabel";
        case ErrorCode::NonFiniteScore: return "NonFiniteScore";
        case ErrorCode::MalformedScore: return "MalformedScore";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::SplitTooSmall: return "SplitTooSmall";
        case ErrorCode::DegenerateCalibrationLabels: return "DegenerateCalibrationLabels";
        case ErrorCode::SingleClassLabels: return "SingleClassLabels";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::MissingCalibration: return "MissingCalibration";
        case ErrorCode::InvalidK: return "InvalidK";
        case ErrorCode::DegenerateVariance: return "DegenerateVariance";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::AllZeroDifferences: return "AllZeroDifferences";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::PermutationBudgetTooSmall: return "PermutationBudgetTooSmall";
        case ErrorCode::EmptyPlan: return "EmptyPlan";
        case ErrorCode::NonExchangeableSpec: return "NonExchangeableSpec";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InternalError: return "InternalError";
    }
    return "Unknown";
}

bool is_numeric_failure(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::SingleClassLabels:
        case ErrorCode::NoConvergence:
        case ErrorCode::DegenerateVariance:
        case ErrorCode::TooFewSamples:
        case ErrorCode::AllZeroDifferences:
        case ErrorCode::InternalError:
            return true;
        default:
            return false;
    }
}

}  // namespace falsifier
