#include "falsifier/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <initializer_list>

#include "falsifier/error.hpp"

namespace falsifier {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
    fail(ErrorCode::ConfigError, "field '" + path + "': " + what);
}

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) bad_field(path.empty() ? "<root>" : path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            bad_field(join(path, key), "unknown key");
    }
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) bad_field(path, "expected a string");
    return v.get<std::string>();
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) bad_field(path, "expected a number");
    return v.get<double>();
}

std::uint64_t get_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    bad_field(path, "expected a non-negative integer");
}

bool get_switch(const json& v, const std::string& path) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) return parse_switch(v.get<std::string>(), path);
    bad_field(path, "expected a boolean or on/off");
}

std::vector<std::string> get_string_list(const json& v, const std::string& path) {
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) bad_field(path, "expected a list of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_string(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

// Re-raises value errors from the enum parsers with the field path attached.
template <typename F>
auto with_field(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ConfigError) throw;
        bad_field(path, e.what());
    }
}

OutcomeRole parse_role(const json& v, const std::string& path) {
    const auto s = get_string(v, path);
    if (s == "permissible") return OutcomeRole::Permissible;
    if (s == "impermissible") return OutcomeRole::Impermissible;
    bad_field(path, "expected 'permissible' or 'impermissible'");
}

DataSource parse_data_source(const json& obj, const std::string& path, const std::filesystem::path& base_dir) {
    check_keys(obj, path, {"path", "score_col", "role_col", "cal_fraction", "true_tokens", "false_tokens"});
    DataSource d;
    if (!obj.contains("path")) bad_field(join(path, "path"), "required");
    d.path = get_string(obj["path"], join(path, "path"));
    if (d.path.is_relative()) d.path = base_dir / d.path;
    if (obj.contains("score_col")) d.score_col = get_string(obj["score_col"], join(path, "score_col"));
    if (obj.contains("role_col") && !obj["role_col"].is_null())
        d.role_col = get_string(obj["role_col"], join(path, "role_col"));
    if (obj.contains("cal_fraction")) {
        d.cal_fraction = get_number(obj["cal_fraction"], join(path, "cal_fraction"));
        if (!(d.cal_fraction > 0.0 && d.cal_fraction < 1.0))
            bad_field(join(path, "cal_fraction"), "must lie in (0, 1)");
    }
    if (obj.contains("true_tokens")) d.tokens.true_tokens = get_string_list(obj["true_tokens"], join(path, "true_tokens"));
    if (obj.contains("false_tokens"))
        d.tokens.false_tokens = get_string_list(obj["false_tokens"], join(path, "false_tokens"));
    return d;
}

}  // namespace

bool parse_switch(std::string_view text, std::string_view field) {
    std::string t(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "on" || t == "true" || t == "yes" || t == "1") return true;
    if (t == "off" || t == "false" || t == "no" || t == "0") return false;
    fail(ErrorCode::ConfigError, "field '" + std::string(field) + "': expected on or off, got '" + std::string(text) + "'");
}

FalsificationConfig parse_falsification(const json& obj, FalsificationConfig c, const std::string& path) {
    check_keys(obj, path,
               {"alpha", "loss", "mode", "wilcoxon", "calibrate", "platt_smoothing", "multi_mode", "permutations",
                "histogram_bins"});
    if (obj.contains("alpha")) {
        c.alpha = get_number(obj["alpha"], join(path, "alpha"));
        if (!(c.alpha > 0.0 && c.alpha < 1.0)) bad_field(join(path, "alpha"), "must lie in (0, 1)");
    }
    if (obj.contains("loss")) {
        const auto p = join(path, "loss");
        c.loss_kind = with_field(p, [&] { return parse_loss_kind(get_string(obj["loss"], p)); });
    }
    if (obj.contains("mode")) {
        const auto p = join(path, "mode");
        c.single_proxy_mode = with_field(p, [&] { return parse_single_proxy_mode(get_string(obj["mode"], p)); });
    }
    if (obj.contains("wilcoxon")) {
        const auto p = join(path, "wilcoxon");
        c.wilcoxon_mode = with_field(p, [&] { return parse_wilcoxon_mode(get_string(obj["wilcoxon"], p)); });
    }
    if (obj.contains("calibrate")) c.calibrate = get_switch(obj["calibrate"], join(path, "calibrate"));
    if (obj.contains("platt_smoothing"))
        c.platt.smoothing = get_switch(obj["platt_smoothing"], join(path, "platt_smoothing"));
    if (obj.contains("multi_mode")) {
        const auto p = join(path, "multi_mode");
        c.multi_proxy_mode = with_field(p, [&] { return parse_multi_proxy_mode(get_string(obj["multi_mode"], p)); });
    }
    if (obj.contains("permutations"))
        c.permutations = static_cast<std::size_t>(get_count(obj["permutations"], join(path, "permutations")));
    if (obj.contains("histogram_bins")) {
        c.histogram_bins = static_cast<std::size_t>(get_count(obj["histogram_bins"], join(path, "histogram_bins")));
        if (c.histogram_bins == 0) bad_field(join(path, "histogram_bins"), "must be positive");
    }
    return c;
}

PlanFile parse_plan_file(const json& root, const std::filesystem::path& base_dir) {
    check_keys(root, "", {"alpha", "policy", "seed", "data", "defaults", "hypotheses"});
    PlanFile pf;
    if (!root.contains("data")) bad_field("data", "required");
    pf.data = parse_data_source(root["data"], "data", base_dir);
    if (root.contains("seed")) pf.seed = get_count(root["seed"], "seed");
    if (root.contains("alpha")) pf.plan.alpha = get_number(root["alpha"], "alpha");
    if (root.contains("policy"))
        pf.plan.policy = with_field("policy", [&] { return parse_plan_policy(get_string(root["policy"], "policy")); });

    FalsificationConfig defaults;
    if (root.contains("defaults")) defaults = parse_falsification(root["defaults"], defaults, "defaults");

    if (!root.contains("hypotheses")) bad_field("hypotheses", "required");
    const auto& hs = root["hypotheses"];
    if (!hs.is_array()) bad_field("hypotheses", "expected a list");
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const std::string p = "hypotheses[" + std::to_string(i) + "]";
        check_keys(hs[i], p, {"label", "permissible", "impermissible", "config"});
        PlannedHypothesis h;
        if (!hs[i].contains("label")) bad_field(join(p, "label"), "required");
        h.label = get_string(hs[i]["label"], join(p, "label"));
        if (!hs[i].contains("permissible")) bad_field(join(p, "permissible"), "required");
        h.permissibles = get_string_list(hs[i]["permissible"], join(p, "permissible"));
        if (h.permissibles.empty()) bad_field(join(p, "permissible"), "needs at least one outcome");
        if (!hs[i].contains("impermissible")) bad_field(join(p, "impermissible"), "required");
        h.impermissible = get_string(hs[i]["impermissible"], join(p, "impermissible"));
        h.config = hs[i].contains("config") ? parse_falsification(hs[i]["config"], defaults, join(p, "config")) : defaults;
        pf.plan.hypotheses.push_back(std::move(h));
    }
    with_field("alpha", [&] { pf.plan.validate(); });
    return pf;
}

std::string_view to_string(ExperimentKind kind) noexcept {
    switch (kind) {
        case ExperimentKind::Type1: return "type1";
        case ExperimentKind::Power: return "power";
        case ExperimentKind::Ablation: return "ablation";
        case ExperimentKind::Generate: return "generate";
    }
    return "type1";
}

SimulationFile parse_simulation_file(const json& root) {
    check_keys(root, "", {"experiment", "procedure", "trials", "alpha", "seed", "spec", "falsification"});
    SimulationFile sf;
    if (root.contains("experiment")) {
        const auto s = get_string(root["experiment"], "experiment");
        bool found = false;
        for (auto k : {ExperimentKind::Type1, ExperimentKind::Power, ExperimentKind::Ablation, ExperimentKind::Generate}) {
            if (s == to_string(k)) {
                sf.experiment = k;
                found = true;
            }
        }
        if (!found) bad_field("experiment", "expected type1, power, ablation or generate");
    }
    if (root.contains("procedure"))
        sf.procedure = with_field(
            "procedure", [&] { return parse_experiment_procedure(get_string(root["procedure"], "procedure")); });
    if (root.contains("trials")) sf.trials = static_cast<std::size_t>(get_count(root["trials"], "trials"));
    if (root.contains("alpha")) {
        sf.alpha = get_number(root["alpha"], "alpha");
        if (!(sf.alpha > 0.0 && sf.alpha < 1.0)) bad_field("alpha", "must lie in (0, 1)");
    }
    if (root.contains("seed")) sf.seed = get_count(root["seed"], "seed");
    if (root.contains("falsification"))
        sf.falsification = parse_falsification(root["falsification"], sf.falsification, "falsification");
    sf.falsification.alpha = sf.alpha;

    if (!root.contains("spec")) bad_field("spec", "required");
    const auto& spec = root["spec"];
    check_keys(spec, "spec", {"n", "n_calibration", "score_transform", "outcomes"});
    if (spec.contains("n")) sf.spec.n = static_cast<std::size_t>(get_count(spec["n"], "spec.n"));
    if (spec.contains("n_calibration"))
        sf.spec.n_calibration = static_cast<std::size_t>(get_count(spec["n_calibration"], "spec.n_calibration"));
    if (spec.contains("score_transform")) {
        const auto s = get_string(spec["score_transform"], "spec.score_transform");
        if (s == "identity") {
            sf.spec.transform = ScoreTransform::Identity;
        } else if (s == "logistic") {
            sf.spec.transform = ScoreTransform::Logistic;
        } else {
            bad_field("spec.score_transform", "expected identity or logistic");
        }
    }
    if (!spec.contains("outcomes")) bad_field("spec.outcomes", "required");
    if (!spec["outcomes"].is_array()) bad_field("spec.outcomes", "expected a list");
    for (std::size_t i = 0; i < spec["outcomes"].size(); ++i) {
        const std::string p = "spec.outcomes[" + std::to_string(i) + "]";
        const auto& o = spec["outcomes"][i];
        check_keys(o, p, {"name", "role", "slope", "intercept"});
        OutcomeLink link;
        if (!o.contains("name")) bad_field(join(p, "name"), "required");
        link.name = get_string(o["name"], join(p, "name"));
        if (o.contains("role")) link.role = parse_role(o["role"], join(p, "role"));
        if (o.contains("slope")) link.slope = get_number(o["slope"], join(p, "slope"));
        if (o.contains("intercept")) link.intercept = get_number(o["intercept"], join(p, "intercept"));
        sf.spec.outcomes.push_back(std::move(link));
    }
    with_field("spec", [&] { sf.spec.validate(); });
    return sf;
}

json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

}  // namespace falsifier
