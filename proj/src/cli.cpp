#include "falsifier/cli.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "falsifier/config_io.hpp"
#include "falsifier/error.hpp"
#include "falsifier/hash.hpp"
#include "falsifier/metrics.hpp"
#include "falsifier/plan.hpp"
#include "falsifier/report.hpp"
#include "falsifier/simharness.hpp"

namespace falsifier {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string out;
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    unsigned threads = 1;
};

struct DataOptions {
    std::string data;
    std::string score_col = "score";
    std::string role_col;
    double cal_fraction = 0.5;
    std::vector<std::string> true_tokens{"1", "true"};
    std::vector<std::string> false_tokens{"0", "false"};
};

struct FalsifyOptions {
    DataOptions data;
    CommonOptions common;
    std::vector<std::string> permissibles;
    std::string impermissible;
    double alpha = 0.05;
    std::string loss = "log";
    std::string mode = "auto";
    std::string wilcoxon = "auto";
    std::string calibrate = "on";
    std::string platt_smoothing = "on";
    std::string multi_mode = "perm";
    std::size_t permutations = 9999;
    std::size_t bins = 30;
    bool export_losses = false;
};

struct MetricsOptions {
    DataOptions data;
    CommonOptions common;
    std::vector<std::string> permissibles;
    std::vector<std::string> impermissibles;
    std::string calibrate = "on";
    std::string platt_smoothing = "on";
    std::vector<double> ppv_ks{2, 10, 50, 75};
    std::vector<double> tnr_ks;
};

struct PlanOptions {
    std::string plan;
    CommonOptions common;
};

struct SimulateOptions {
    std::string spec;
    CommonOptions common;
};

const std::vector<std::string> kSwitchValues{"on", "off"};

void add_common(CLI::App* app, CommonOptions& c) {
    app->add_option("--out", c.out, "Output directory (default: $" + std::string(kOutDirEnv) + " or " +
                                        kDefaultOutDir + ")");
    c.seed_opt = app->add_option("--seed", c.seed, "Master seed; drawn and printed when absent");
    app->add_option("--threads", c.threads, "Worker threads (0 = all cores); results do not depend on it")
        ->capture_default_str();
}

void add_data(CLI::App* app, DataOptions& d) {
    app->add_option("--data", d.data, "Input CSV file")->required()->check(CLI::ExistingFile);
    app->add_option("--score-col", d.score_col, "Score column")->capture_default_str();
    app->add_option("--role-col", d.role_col, "Column holding calibration/evaluation per row");
    app->add_option("--cal-fraction", d.cal_fraction, "Calibration share for random splitting")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--true-token", d.true_tokens, "Label spellings read as 1")->capture_default_str();
    app->add_option("--false-token", d.false_tokens, "Label spellings read as 0")->capture_default_str();
}

void add_falsify(CLI::App* app, FalsifyOptions& o, bool multi) {
    add_data(app, o.data);
    add_common(app, o.common);
    auto* perm = app->add_option("--permissible", o.permissibles,
                                 multi ? "Permissible outcome column (repeatable)" : "Permissible outcome column");
    perm->required();
    if (!multi) perm->expected(1);
    app->add_option("--impermissible", o.impermissible, "Impermissible outcome column")->required();
    app->add_option("--alpha", o.alpha, "Significance level")->capture_default_str();
    app->add_option("--loss", o.loss, "Loss function")->check(CLI::IsMember({"log", "brier"}))->capture_default_str();
    app->add_option("--calibrate", o.calibrate, "Platt calibration")->check(CLI::IsMember(kSwitchValues))->capture_default_str();
    app->add_option("--platt-smoothing", o.platt_smoothing, "Platt target smoothing")
        ->check(CLI::IsMember(kSwitchValues))
        ->capture_default_str();
    app->add_option("--bins", o.bins, "Histogram bins for the difference summary")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_flag("--export-losses", o.export_losses, "Also write the evaluation loss matrix to losses.csv");
    if (multi) {
        app->add_option("--multi-mode", o.multi_mode, "Rank test")
            ->check(CLI::IsMember({"perm", "normal"}))
            ->capture_default_str();
        app->add_option("--permutations", o.permutations, "Permutation replicas B")->capture_default_str();
    } else {
        app->add_option("--mode", o.mode, "Single-proxy test")
            ->check(CLI::IsMember({"auto", "t", "wilcoxon"}))
            ->capture_default_str();
        app->add_option("--wilcoxon", o.wilcoxon, "Wilcoxon null distribution")
            ->check(CLI::IsMember({"auto", "exact", "normal"}))
            ->capture_default_str();
    }
}

fs::path resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return kDefaultOutDir;
}

std::uint64_t resolve_seed(const CommonOptions& c, std::optional<std::uint64_t> file_seed, std::ostream& out) {
    if (c.seed_opt && c.seed_opt->count() > 0) return c.seed;
    if (file_seed) return *file_seed;
    std::random_device rd;
    const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    out << "seed: " << seed << '\n';
    return seed;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, "cannot write " + path.string());
    f << text;
    if (!f) fail(ErrorCode::IoError, "write failed for " + path.string());
}

fs::path prepare_out_dir(const std::string& flag) {
    const fs::path dir = resolve_out_dir(flag);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());
    return dir;
}

std::string file_hash(const fs::path& path) { return fnv1a_hex(read_file(path)); }

std::string manifest_line(const RunManifest& m) { return "# manifest: " + m.hash() + "\n"; }

RunManifest make_manifest(std::string command, const Json& effective_config, std::string input_hash,
                          std::uint64_t seed) {
    RunManifest m;
    m.command = std::move(command);
    m.config_hash = fnv1a_hex(effective_config.dump());
    m.input_hash = std::move(input_hash);
    m.seed = seed;
    m.timestamp = reproducible_timestamp();
    return m;
}

Json data_json(const DataOptions& d) {
    Json j;
    j["score_col"] = d.score_col;
    j["role_col"] = d.role_col.empty() ? Json(nullptr) : Json(d.role_col);
    j["cal_fraction"] = d.cal_fraction;
    j["true_tokens"] = d.true_tokens;
    j["false_tokens"] = d.false_tokens;
    return j;
}

CsvLoadOptions load_options(const DataOptions& d, std::vector<OutcomeSpec> outcomes) {
    CsvLoadOptions o;
    o.score_col = d.score_col;
    o.outcomes = std::move(outcomes);
    if (!d.role_col.empty()) o.role_col = d.role_col;
    o.tokens.true_tokens = d.true_tokens;
    o.tokens.false_tokens = d.false_tokens;
    return o;
}

EvalDataset load_split(const fs::path& path, const CsvLoadOptions& options, double cal_fraction, std::uint64_t seed) {
    EvalDataset ds = load_csv(path, options);
    if (!ds.is_split()) ds = split(ds, cal_fraction, seed);
    return ds;
}

std::string fmt_p(double p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", p);
    return buf;
}

int cmd_falsify(const FalsifyOptions& o, Procedure procedure, std::ostream& out) {
    FalsificationConfig cfg;
    cfg.alpha = o.alpha;
    cfg.loss_kind = parse_loss_kind(o.loss);
    cfg.calibrate = parse_switch(o.calibrate, "calibrate");
    cfg.platt.smoothing = parse_switch(o.platt_smoothing, "platt-smoothing");
    cfg.single_proxy_mode = parse_single_proxy_mode(o.mode);
    cfg.wilcoxon_mode = parse_wilcoxon_mode(o.wilcoxon);
    cfg.multi_proxy_mode = parse_multi_proxy_mode(o.multi_mode);
    cfg.permutations = o.permutations;
    cfg.histogram_bins = o.bins;
    cfg.threads = o.common.threads;
    if (o.permissibles.empty()) fail(ErrorCode::ConfigError, "at least one --permissible outcome is required");
    cfg.validate(procedure);
    cfg.seed = resolve_seed(o.common, std::nullopt, out);

    std::vector<OutcomeSpec> outcomes;
    for (const auto& p : o.permissibles) outcomes.push_back({p, OutcomeRole::Permissible});
    outcomes.push_back({o.impermissible, OutcomeRole::Impermissible});
    const EvalDataset ds = load_split(o.data.data, load_options(o.data, outcomes), o.data.cal_fraction, cfg.seed);

    const auto rep = procedure == Procedure::SingleProxy
                         ? run_single_proxy(ds, o.permissibles.front(), o.impermissible, cfg)
                         : run_multi_proxy(ds, o.permissibles, o.impermissible, cfg);

    const std::string command = procedure == Procedure::SingleProxy ? "falsify-single" : "falsify-multi";
    Json effective;
    effective["command"] = command;
    effective["data"] = data_json(o.data);
    effective["permissible"] = o.permissibles;
    effective["impermissible"] = o.impermissible;
    effective["falsification"] = to_json(cfg);
    const RunManifest manifest = make_manifest(command, effective, file_hash(o.data.data), cfg.seed);

    const fs::path dir = prepare_out_dir(o.common.out);
    write_text(dir / "report.json", dump(to_json(rep, &manifest)));
    emit_plot_data(rep, dir, manifest.hash());
    if (o.export_losses) {
        std::ostringstream csv;
        csv << manifest_line(manifest);
        write_loss_csv(csv, *rep.losses, rep.loss_row_ids);
        write_text(dir / "losses.csv", csv.str());
    }

    out << verdict_line(rep.verdict) << '\n';
    out << "p = " << fmt_p(rep.test.p_value) << " (" << to_string(rep.test.method) << ", n = " << rep.n << ")\n";
    out << "report: " << (dir / "report.json").string() << '\n';
    return 0;
}

int cmd_metrics(const MetricsOptions& o, std::ostream& out) {
    const bool calibrate = parse_switch(o.calibrate, "calibrate");
    const std::uint64_t seed = resolve_seed(o.common, std::nullopt, out);

    std::vector<OutcomeSpec> outcomes;
    for (const auto& p : o.permissibles) outcomes.push_back({p, OutcomeRole::Permissible});
    for (const auto& p : o.impermissibles) outcomes.push_back({p, OutcomeRole::Impermissible});
    const auto options = load_options(o.data, outcomes);
    // Without calibration there is nothing to fit, so an unsplit file is
    // evaluated on every row.
    const EvalDataset ds = calibrate ? load_split(o.data.data, options, o.data.cal_fraction, seed)
                                     : load_csv(o.data.data, options);

    FalsificationConfig cfg;
    cfg.calibrate = calibrate;
    cfg.platt.smoothing = parse_switch(o.platt_smoothing, "platt-smoothing");
    std::map<std::string, std::vector<double>> predictions;
    const auto rows = ds.indices(SplitRole::Evaluation);
    if (calibrate) {
        const auto cals = fit_calibrations(ds, cfg);
        for (const auto& [name, cal] : cals) {
            auto& p = predictions[name];
            for (std::size_t i : rows) p.push_back(falsifier::calibrate(cal, ds.scores()[i]));
        }
    } else {
        for (const auto& spec : ds.outcomes()) {
            auto& p = predictions[spec.name];
            for (std::size_t i : rows) p.push_back(ds.scores()[i]);
        }
    }
    MetricOptions mo;
    mo.ppv_ks = o.ppv_ks;
    mo.tnr_ks = o.tnr_ks;
    const MetricTable table = metric_table(ds, predictions, mo, calibrate ? "calibrated" : "raw");

    Json effective;
    effective["command"] = "metrics";
    effective["data"] = data_json(o.data);
    effective["permissible"] = o.permissibles;
    effective["impermissible"] = o.impermissibles;
    effective["calibrate"] = calibrate;
    effective["platt_smoothing"] = cfg.platt.smoothing;
    effective["ppv_k"] = o.ppv_ks;
    effective["tnr_k"] = o.tnr_ks;
    const RunManifest manifest = make_manifest("metrics", effective, file_hash(o.data.data), seed);

    Json j;
    j["version"] = kReportSchemaVersion;
    j["n_evaluation"] = rows.size();
    j["metrics"] = to_json(table);
    j["dataset_fingerprint"] = ds.fingerprint();
    j["manifest"] = manifest.to_json();
    j["manifest_hash"] = manifest.hash();

    const fs::path dir = prepare_out_dir(o.common.out);
    write_text(dir / "metrics.json", dump(j));
    std::ostringstream csv, txt;
    csv << manifest_line(manifest);
    write_metric_csv(csv, table);
    write_text(dir / "metrics.csv", csv.str());
    txt << manifest_line(manifest);
    write_metric_text(txt, table);
    write_text(dir / "metrics.txt", txt.str());

    write_metric_text(out, table);
    return 0;
}

int cmd_plan(const PlanOptions& o, std::ostream& out) {
    const fs::path plan_path = o.plan;
    PlanFile pf = parse_plan_file(read_json_file(plan_path), plan_path.parent_path());
    const std::uint64_t seed = resolve_seed(o.common, pf.seed, out);
    for (auto& h : pf.plan.hypotheses) {
        h.config.seed = seed;
        h.config.threads = o.common.threads;
        h.config.validate(h.permissibles.size() == 1 ? Procedure::SingleProxy : Procedure::MultiProxy);
    }

    // The first hypothesis fixes the load-time roles; every run re-selects
    // its own roles.
    std::vector<OutcomeSpec> outcomes;
    std::set<std::string> seen;
    const auto& first = pf.plan.hypotheses.front();
    outcomes.push_back({first.impermissible, OutcomeRole::Impermissible});
    seen.insert(first.impermissible);
    for (const auto& h : pf.plan.hypotheses) {
        for (const auto& p : h.permissibles)
            if (seen.insert(p).second) outcomes.push_back({p, OutcomeRole::Permissible});
        if (seen.insert(h.impermissible).second) outcomes.push_back({h.impermissible, OutcomeRole::Permissible});
    }
    const EvalDataset ds = load_split(pf.data.path, load_options(DataOptions{pf.data.path.string(), pf.data.score_col,
                                                                             pf.data.role_col.value_or(""),
                                                                             pf.data.cal_fraction,
                                                                             pf.data.tokens.true_tokens,
                                                                             pf.data.tokens.false_tokens},
                                                                 outcomes),
                                      pf.data.cal_fraction, seed);

    const PlanRun run = execute_plan(pf.plan, ds);

    Json effective;
    effective["command"] = "plan";
    effective["plan"] = Json::parse(read_json_file(plan_path).dump());
    effective["seed"] = seed;
    const RunManifest manifest =
        make_manifest("plan", effective, file_hash(pf.data.path) + ":" + file_hash(plan_path), seed);

    Json j;
    j["version"] = kReportSchemaVersion;
    j["plan"] = to_json(run.result);
    Json hs = Json::array();
    for (std::size_t i = 0; i < pf.plan.hypotheses.size(); ++i) {
        const auto& h = pf.plan.hypotheses[i];
        Json e;
        e["label"] = h.label;
        e["permissible"] = h.permissibles;
        e["impermissible"] = h.impermissible;
        e["error"] = run.errors[i].empty() ? Json(nullptr) : Json(run.errors[i]);
        e["report"] = run.reports[i] ? to_json(*run.reports[i]) : Json(nullptr);
        hs.push_back(e);
    }
    j["hypotheses"] = hs;
    j["dataset_fingerprint"] = ds.fingerprint();
    j["manifest"] = manifest.to_json();
    j["manifest_hash"] = manifest.hash();

    const fs::path dir = prepare_out_dir(o.common.out);
    write_text(dir / "plan_report.json", dump(j));
    std::ostringstream csv;
    csv << manifest_line(manifest) << "label,p_value,threshold,decision,stage\n";
    for (const auto& d : run.result.decisions) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", d.p_value, d.threshold);
        csv << d.label << ',' << buf << ',' << (d.rejected ? "reject" : "fail_to_reject") << ',' << d.stage << '\n';
    }
    write_text(dir / "plan_decisions.csv", csv.str());

    for (const auto& d : run.result.decisions) {
        out << d.label << ": " << (d.rejected ? "reject (DISCRIMINANT)" : "fail to reject (INDISCRIMINANT)")
            << "  p = " << fmt_p(d.p_value) << ", threshold = " << fmt_p(d.threshold) << '\n';
    }
    return 0;
}

std::string impermissible_of(const SyntheticSpec& spec) {
    for (const auto& o : spec.outcomes)
        if (o.role == OutcomeRole::Impermissible) return o.name;
    return {};
}

std::vector<std::string> permissibles_of(const SyntheticSpec& spec) {
    std::vector<std::string> out;
    for (const auto& o : spec.outcomes)
        if (o.role == OutcomeRole::Permissible) out.push_back(o.name);
    return out;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
    const fs::path spec_path = o.spec;
    const Json raw = Json::parse(read_json_file(spec_path).dump());
    SimulationFile sf = parse_simulation_file(read_json_file(spec_path));
    const std::uint64_t seed = resolve_seed(o.common, sf.seed, out);
    sf.spec.seed = seed;
    sf.falsification.seed = seed;
    sf.falsification.threads = 1;

    Json effective;
    effective["command"] = "simulate";
    effective["spec"] = raw;
    effective["seed"] = seed;
    const RunManifest manifest = make_manifest("simulate", effective, file_hash(spec_path), seed);
    const fs::path dir = prepare_out_dir(o.common.out);

    Json j;
    j["version"] = kReportSchemaVersion;
    j["experiment"] = to_string(sf.experiment);
    switch (sf.experiment) {
        case ExperimentKind::Type1:
        case ExperimentKind::Power: {
            const auto res = sf.experiment == ExperimentKind::Type1
                                 ? type1_experiment(sf.spec, sf.procedure, sf.trials, sf.alpha, sf.falsification,
                                                    o.common.threads)
                                 : power_experiment(sf.spec, sf.procedure, sf.trials, sf.alpha, sf.falsification,
                                                    o.common.threads);
            j["result"] = to_json(res);
            std::ostringstream csv;
            csv << manifest_line(manifest) << "trial,seed,p_value,rejected\n";
            for (std::size_t t = 0; t < res.trials; ++t) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.17g", res.p_values[t]);
                csv << t << ',' << res.trial_seeds[t] << ',' << buf << ',' << (res.p_values[t] <= res.alpha ? 1 : 0)
                    << '\n';
            }
            write_text(dir / "experiment.csv", csv.str());
            out << to_string(sf.experiment) << " " << to_string(res.procedure) << ": rejection rate "
                << fmt_p(res.rejection_rate) << " (" << res.rejections << "/" << res.trials << ")\n";
            break;
        }
        case ExperimentKind::Ablation: {
            const EvalDataset ds = generate(sf.spec);
            const auto rows = ablation_run(ds, permissibles_of(sf.spec), impermissible_of(sf.spec), sf.falsification);
            j["result"] = to_json(rows);
            std::ostringstream csv;
            csv << manifest_line(manifest) << "calibration,loss,summary,p_value,verdict,error\n";
            for (const auto& r : rows) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g", r.summary, r.p_value);
                csv << (r.calibrate ? "platt" : "none") << ',' << to_string(r.loss) << ',' << buf << ','
                    << (r.error.empty() ? std::string(to_string(r.verdict)) : std::string()) << ",\""
                    << r.error << "\"\n";
                out << (r.calibrate ? "platt" : "none ") << "  " << to_string(r.loss) << "  "
                    << (r.error.empty() ? std::string(verdict_line(r.verdict)) + "  p = " + fmt_p(r.p_value)
                                        : "error: " + r.error)
                    << '\n';
            }
            write_text(dir / "ablation.csv", csv.str());
            break;
        }
        case ExperimentKind::Generate: {
            const EvalDataset ds = generate(sf.spec);
            std::ostringstream csv;
            csv << manifest_line(manifest) << "score";
            for (const auto& spec : ds.outcomes()) csv << ',' << spec.name;
            csv << ",role\n";
            for (std::size_t i = 0; i < ds.size(); ++i) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.17g", ds.scores()[i]);
                csv << buf;
                for (std::size_t k = 0; k < ds.outcome_count(); ++k) csv << ',' << int(ds.labels(k)[i]);
                csv << ',' << to_string(ds.split_assignment()[i]) << '\n';
            }
            write_text(dir / "data.csv", csv.str());
            j["result"] = Json{{"rows", ds.size()}, {"file", "data.csv"}, {"dataset_fingerprint", ds.fingerprint()}};
            out << "wrote " << (dir / "data.csv").string() << " (" << ds.size() << " rows)\n";
            break;
        }
    }
    j["manifest"] = manifest.to_json();
    j["manifest_hash"] = manifest.hash();
    write_text(dir / (sf.experiment == ExperimentKind::Generate   ? "generate.json"
                      : sf.experiment == ExperimentKind::Ablation ? "ablation.json"
                                                                  : "experiment.json"),
               dump(j));
    return 0;
}

void print_error_json(std::ostream& err, std::string_view code, const std::string& message, int exit_code) {
    Json j;
    j["error"] = Json{{"code", code}, {"message", message}, {"exit_code", exit_code}};
    err << j.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discriminant-validity falsification tests for predictive scores", "falsifier"};
    app.set_config("--config", "", "TOML file of option values; command-line flags take precedence");
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    FalsifyOptions single, multi;
    MetricsOptions metrics;
    PlanOptions plan;
    SimulateOptions simulate;

    auto* sub_single = app.add_subcommand("falsify-single", "Test with one permissible proxy");
    add_falsify(sub_single, single, false);
    auto* sub_multi = app.add_subcommand("falsify-multi", "Rank test with one or more permissible proxies");
    add_falsify(sub_multi, multi, true);

    auto* sub_metrics = app.add_subcommand("metrics", "Predictive metric table per outcome");
    add_data(sub_metrics, metrics.data);
    add_common(sub_metrics, metrics.common);
    sub_metrics->add_option("--permissible", metrics.permissibles, "Permissible outcome column (repeatable)")
        ->required();
    sub_metrics->add_option("--impermissible", metrics.impermissibles, "Impermissible outcome column (repeatable)")
        ->required();
    sub_metrics->add_option("--calibrate", metrics.calibrate, "Platt-calibrated predictions for MSE")
        ->check(CLI::IsMember(kSwitchValues))
        ->capture_default_str();
    sub_metrics->add_option("--platt-smoothing", metrics.platt_smoothing, "Platt target smoothing")
        ->check(CLI::IsMember(kSwitchValues))
        ->capture_default_str();
    sub_metrics->add_option("--ppv-k", metrics.ppv_ks, "PPV cutoffs in percent")
        ->delimiter(',')
        ->capture_default_str();
    sub_metrics->add_option("--tnr-k", metrics.tnr_ks, "TNR cutoffs in percent")->delimiter(',');

    auto* sub_plan = app.add_subcommand("plan", "Run a pre-registered test plan");
    sub_plan->add_option("--plan", plan.plan, "Plan file (JSON)")->required()->check(CLI::ExistingFile);
    add_common(sub_plan, plan.common);

    auto* sub_sim = app.add_subcommand("simulate", "Synthetic experiments");
    sub_sim->add_option("--spec", simulate.spec, "Simulation file (JSON)")->required()->check(CLI::ExistingFile);
    add_common(sub_sim, simulate.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return 0;
        print_error_json(err, "UsageError", e.what(), 2);
        return 2;
    }

    try {
        if (sub_single->parsed()) return cmd_falsify(single, Procedure::SingleProxy, out);
        if (sub_multi->parsed()) return cmd_falsify(multi, Procedure::MultiProxy, out);
        if (sub_metrics->parsed()) return cmd_metrics(metrics, out);
        if (sub_plan->parsed()) return cmd_plan(plan, out);
        if (sub_sim->parsed()) return cmd_simulate(simulate, out);
    } catch (const Error& e) {
        const int code = is_numeric_failure(e.code()) ? 1 : 2;
        err << "error: " << e.what() << '\n';
        print_error_json(err, error_code_name(e.code()), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        print_error_json(err, "IoError", e.what(), 2);
        return 2;
    }
    return 2;
}

}  // namespace falsifier
