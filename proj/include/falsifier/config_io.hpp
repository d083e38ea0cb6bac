#pragma once

// Readers for the JSON plan and simulation files. Unknown keys and bad
// values raise ConfigError naming the offending field path, for example
// "hypotheses[1].loss".

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "falsifier/dataset.hpp"
#include "falsifier/falsify.hpp"
#include "falsifier/plan.hpp"
#include "falsifier/simharness.hpp"

namespace falsifier {

// "on"/"off", "true"/"false", "yes"/"no"
bool parse_switch(std::string_view text, std::string_view field);

// Overlays the keys present in `object` onto `base`. Keys: alpha, loss,
// mode, wilcoxon, calibrate, platt_smoothing, multi_mode, permutations,
// histogram_bins.
FalsificationConfig parse_falsification(const nlohmann::json& object, FalsificationConfig base,
                                        const std::string& path);

struct DataSource {
    std::filesystem::path path;
    std::string score_col = "score";
    std::optional<std::string> role_col;
    double cal_fraction = 0.5;
    LabelTokens tokens;
};

struct PlanFile {
    DataSource data;
    std::optional<std::uint64_t> seed;
    TestPlan plan;
};

// Relative data paths resolve against `base_dir`.
PlanFile parse_plan_file(const nlohmann::json& root, const std::filesystem::path& base_dir);

enum class ExperimentKind { Type1, Power, Ablation, Generate };

std::string_view to_string(ExperimentKind kind) noexcept;

struct SimulationFile {
    ExperimentKind experiment = ExperimentKind::Type1;
    ExperimentProcedure procedure = ExperimentProcedure::Alg1;
    std::size_t trials = 1000;
    double alpha = 0.05;
    std::optional<std::uint64_t> seed;
    SyntheticSpec spec;
    FalsificationConfig falsification;
};

SimulationFile parse_simulation_file(const nlohmann::json& root);

// Reads and parses a JSON file; ParseError with position on malformed text.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace falsifier
