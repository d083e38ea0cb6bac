#include "falsifier/report.hpp"

#include <cstdlib>
#include <ctime>

#include "falsifier/hash.hpp"

namespace falsifier {

Json RunManifest::to_json() const {
    Json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["input_hash"] = input_hash;
    j["seed"] = seed;
    j["tool_version"] = tool_version;
    j["timestamp"] = timestamp ? Json(*timestamp) : Json(nullptr);
    return j;
}

std::string RunManifest::hash() const {
    Json j = to_json();
    j.erase("timestamp");
    return fnv1a_hex(j.dump());
}

std::optional<std::string> reproducible_timestamp() {
    const char* env = std::getenv("SOURCE_DATE_EPOCH");
    if (!env || !*env) return std::nullopt;
    char* end = nullptr;
    const long long secs = std::strtoll(env, &end, 10);
    if (end == env || *end != '\0') return std::nullopt;
    const std::time_t t = static_cast<std::time_t>(secs);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return std::string(buf);
}

Json to_json(const Calibration& calibration) {
    Json j;
    if (const auto* p = std::get_if<PlattParams>(&calibration)) {
        j["outcome"] = p->outcome;
        j["kind"] = "platt";
        j["a"] = p->a;
        j["b"] = p->b;
        j["n_fit"] = p->n_fit;
        j["smoothing_applied"] = p->smoothing_applied;
        j["iterations"] = p->iterations;
    } else {
        j["outcome"] = calibration_outcome(calibration);
        j["kind"] = "identity";
    }
    return j;
}

Json to_json(const FalsificationConfig& c) {
    Json j;
    j["alpha"] = c.alpha;
    j["loss_kind"] = to_string(c.loss_kind);
    j["calibrate"] = c.calibrate;
    j["platt_smoothing"] = c.platt.smoothing;
    j["platt_max_iter"] = c.platt.max_iter;
    j["platt_tol"] = c.platt.tol;
    j["single_proxy_mode"] = to_string(c.single_proxy_mode);
    j["wilcoxon_mode"] = to_string(c.wilcoxon_mode);
    j["multi_proxy_mode"] = to_string(c.multi_proxy_mode);
    j["permutations"] = c.permutations;
    j["seed"] = c.seed;
    j["histogram_bins"] = c.histogram_bins;
    return j;
}

Json to_json(const TestResult& r) {
    Json j;
    j["method"] = to_string(r.method);
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    j["n_effective"] = r.n_effective;
    j["notes"] = r.notes;
    return j;
}

Json to_json(const DiagnosticReport& d) {
    Json j;
    j["normality_test"] = "dagostino_pearson_k2";
    j["normality_p"] = d.normality_p ? Json(*d.normality_p) : Json(nullptr);
    j["n_outliers"] = d.n_outliers ? Json(*d.n_outliers) : Json(nullptr);
    j["recommendation"] = to_string(d.recommendation);
    return j;
}

Json to_json(const FalsificationReport& rep, const RunManifest* manifest) {
    Json j;
    j["version"] = kReportSchemaVersion;
    j["procedure"] = to_string(rep.procedure);
    j["verdict"] = to_string(rep.verdict);
    j["verdict_text"] = verdict_line(rep.verdict);
    j["p_value"] = rep.test.p_value;
    j["statistic"] = rep.test.statistic;
    j["method"] = to_string(rep.test.method);
    j["alpha"] = rep.config.alpha;
    j["n"] = rep.n;
    j["M"] = rep.permissibles.size();
    if (rep.procedure == Procedure::MultiProxy && rep.config.multi_proxy_mode == MultiProxyMode::Permutation)
        j["B"] = rep.config.permutations;
    else
        j["B"] = nullptr;
    j["seed"] = rep.config.seed;
    j["loss_kind"] = to_string(rep.config.loss_kind);
    j["calibrate"] = rep.config.calibrate;
    j["impermissible"] = rep.impermissible;
    j["permissibles"] = rep.permissibles;
    j["test"] = to_json(rep.test);
    j["diagnostics"] = rep.diagnostics ? to_json(*rep.diagnostics) : Json(nullptr);

    Json cal = Json::array();
    for (const auto& c : rep.calibration_audit) cal.push_back(to_json(c));
    j["calibration"] = cal;

    if (rep.rank_summary) {
        Json rs;
        rs["M"] = rep.rank_summary->m;
        rs["mean_rank"] = rep.rank_summary->mean_rank;
        rs["null_mean_rank"] = rep.rank_summary->null_mean;
        Json bins = Json::array();
        for (const auto& b : rep.rank_summary->bins) {
            Json e;
            e["rank"] = b.rank;
            e["count"] = b.count;
            e["proportion"] = b.proportion;
            e["null_expectation"] = b.null_expectation;
            bins.push_back(e);
        }
        rs["bins"] = bins;
        if (rep.config.multi_proxy_mode == MultiProxyMode::Normal)
            rs["variance_model"] = "per-row conditional rank variance";
        j["rank_summary"] = rs;
    } else {
        j["rank_summary"] = nullptr;
    }
    if (rep.diff_summary) {
        Json ds;
        ds["definition"] = "impermissible loss minus permissible loss";
        ds["mean"] = rep.diff_summary->mean;
        ds["median"] = rep.diff_summary->median;
        ds["n"] = rep.diff_summary->n;
        Json bins = Json::array();
        for (const auto& b : rep.diff_summary->bins) {
            Json e;
            e["bin_left"] = b.left;
            e["bin_right"] = b.right;
            e["count"] = b.count;
            bins.push_back(e);
        }
        ds["bins"] = bins;
        j["diff_summary"] = ds;
    } else {
        j["diff_summary"] = nullptr;
    }
    j["config"] = to_json(rep.config);
    j["dataset_fingerprint"] = rep.dataset_fingerprint;
    if (manifest) {
        j["manifest"] = manifest->to_json();
        j["manifest_hash"] = manifest->hash();
    }
    return j;
}

Json to_json(const PlanResult& result) {
    Json j;
    j["family_alpha"] = result.family_alpha;
    j["policy"] = to_string(result.policy);
    Json ds = Json::array();
    for (const auto& d : result.decisions) {
        Json e;
        e["label"] = d.label;
        e["p_value"] = d.p_value;
        e["threshold"] = d.threshold;
        e["decision"] = d.rejected ? "reject" : "fail_to_reject";
        e["stage"] = d.stage;
        ds.push_back(e);
    }
    j["decisions"] = ds;
    return j;
}

Json to_json(const MetricTable& table) {
    Json j;
    j["au_pr_method"] = table.au_pr_method;
    j["prediction_source"] = table.prediction_source;
    j["ranking_metrics_on"] = "raw score";
    Json rows = Json::array();
    for (const auto& r : table.rows) {
        Json e;
        e["outcome"] = r.outcome;
        e["role"] = to_string(r.role);
        e["auc"] = r.auc;
        e["au_pr"] = r.au_pr;
        e["mse"] = r.mse ? Json(*r.mse) : Json(nullptr);
        Json ppv = Json::array();
        for (const auto& [k, v] : r.ppv) ppv.push_back(Json{{"k_percent", k}, {"value", v}});
        e["ppv_at_top_k"] = ppv;
        Json tnr = Json::array();
        for (const auto& [k, v] : r.tnr) tnr.push_back(Json{{"k_percent", k}, {"value", v}});
        e["tnr_at_top_k"] = tnr;
        rows.push_back(e);
    }
    j["rows"] = rows;
    return j;
}

Json to_json(const ExperimentResult& r) {
    Json j;
    j["procedure"] = to_string(r.procedure);
    j["trials"] = r.trials;
    j["alpha"] = r.alpha;
    j["rejections"] = r.rejections;
    j["rejection_rate"] = r.rejection_rate;
    j["mean_p"] = r.mean_p;
    j["uncomputable_trials"] = r.uncomputable_trials;
    j["trial_seeds"] = r.trial_seeds;
    j["p_values"] = r.p_values;
    return j;
}

Json to_json(const std::vector<AblationRow>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows) {
        Json e;
        e["calibration"] = r.calibrate ? "platt" : "none";
        e["loss"] = to_string(r.loss);
        e["summary"] = r.summary;
        e["p_value"] = r.p_value;
        e["verdict"] = r.error.empty() ? Json(to_string(r.verdict)) : Json(nullptr);
        e["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
        arr.push_back(e);
    }
    return arr;
}

std::string dump(const Json& json) { return json.dump(2) + "\n"; }

}  // namespace falsifier
