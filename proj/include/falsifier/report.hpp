#pragma once

// JSON serialization of reports, plan results, metric tables and experiment
// results, plus the run manifest embedded in every emitted file.
//
// All objects use insertion-ordered keys and shortest round-trip number
// formatting, so equal inputs give byte-identical output.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "falsifier/calibration.hpp"
#include "falsifier/falsify.hpp"
#include "falsifier/metrics.hpp"
#include "falsifier/mht.hpp"
#include "falsifier/simharness.hpp"

namespace falsifier {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string input_hash;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    // Taken from SOURCE_DATE_EPOCH when set; excluded from the hash.
    std::optional<std::string> timestamp;

    Json to_json() const;
    std::string hash() const;
};

// ISO-8601 UTC rendering of SOURCE_DATE_EPOCH, if the variable is set.
std::optional<std::string> reproducible_timestamp();

Json to_json(const Calibration& calibration);
// Excludes the thread count, which never affects results.
Json to_json(const FalsificationConfig& config);
Json to_json(const TestResult& result);
Json to_json(const DiagnosticReport& diagnostics);
Json to_json(const FalsificationReport& report, const RunManifest* manifest = nullptr);
Json to_json(const PlanResult& result);
Json to_json(const MetricTable& table);
Json to_json(const ExperimentResult& result);
Json to_json(const std::vector<AblationRow>& rows);

// Pretty-printed with a trailing newline.
std::string dump(const Json& json);

}  // namespace falsifier
