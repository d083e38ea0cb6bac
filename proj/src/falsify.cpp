#include "falsifier/falsify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <thread>

#include "falsifier/error.hpp"
#include "falsifier/random.hpp"

namespace falsifier {

std::string_view to_string(Verdict v) noexcept {
    return v == Verdict::Discriminant ? "DISCRIMINANT" : "INDISCRIMINANT";
}

std::string_view verdict_line(Verdict v) noexcept {
    return v == Verdict::Discriminant ? "DISCRIMINANT" : "INDISCRIMINANT (inconclusive)";
}

std::string_view to_string(SingleProxyMode m) noexcept {
    switch (m) {
        case SingleProxyMode::Auto: return "auto";
        case SingleProxyMode::TTest: return "t";
        case SingleProxyMode::Wilcoxon: return "wilcoxon";
    }
    return "auto";
}

std::string_view to_string(MultiProxyMode m) noexcept {
    return m == MultiProxyMode::Permutation ? "perm" : "normal";
}

std::string_view to_string(Procedure p) noexcept {
    return p == Procedure::SingleProxy ? "single_proxy" : "multi_proxy";
}

SingleProxyMode parse_single_proxy_mode(std::string_view text) {
    if (text == "auto") return SingleProxyMode::Auto;
    if (text == "t" || text == "t_test") return SingleProxyMode::TTest;
    if (text == "wilcoxon") return SingleProxyMode::Wilcoxon;
    fail(ErrorCode::ConfigError, "unknown single-proxy mode '" + std::string(text) + "'");
}

MultiProxyMode parse_multi_proxy_mode(std::string_view text) {
    if (text == "perm" || text == "permutation") return MultiProxyMode::Permutation;
    if (text == "normal") return MultiProxyMode::Normal;
    fail(ErrorCode::ConfigError, "unknown multi-proxy mode '" + std::string(text) + "'");
}

void FalsificationConfig::validate(Procedure procedure) const {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::ConfigError, "alpha must lie in (0, 1)");
    if (procedure == Procedure::MultiProxy && multi_proxy_mode == MultiProxyMode::Permutation &&
        permutations < kMinPermutations) {
        fail(ErrorCode::PermutationBudgetTooSmall,
             "permutation budget B=" + std::to_string(permutations) + " is below the minimum of " +
                 std::to_string(kMinPermutations));
    }
    if (histogram_bins == 0) fail(ErrorCode::ConfigError, "histogram needs at least one bin");
}

std::vector<double> RowRanks::impermissible_ranks() const {
    std::vector<double> out(rows);
    for (std::size_t i = 0; i < rows; ++i) out[i] = impermissible_rank(i);
    return out;
}

RowRanks rank_rows(const LossMatrix& matrix) {
    RowRanks rr;
    rr.rows = matrix.rows();
    rr.cols = matrix.cols();
    rr.impermissible = matrix.impermissible_column();
    rr.ranks.reserve(rr.rows * rr.cols);
    const double k = static_cast<double>(rr.cols);
    const double expected_sum = k * (k + 1.0) / 2.0;
    for (std::size_t i = 0; i < rr.rows; ++i) {
        const auto r = average_ranks(matrix.row(i));
        const double sum = std::accumulate(r.begin(), r.end(), 0.0);
        if (sum != expected_sum)
            fail(ErrorCode::InternalError, "row " + std::to_string(i) + " ranks do not sum to (M+1)(M+2)/2");
        rr.ranks.insert(rr.ranks.end(), r.begin(), r.end());
    }
    return rr;
}

TestResult rank_permutation_test(const RowRanks& ranks, std::size_t permutations, std::uint64_t seed,
                                 unsigned threads) {
    if (permutations < kMinPermutations)
        fail(ErrorCode::PermutationBudgetTooSmall, "permutation budget below " + std::to_string(kMinPermutations));
    if (ranks.rows == 0) fail(ErrorCode::TooFewSamples, "no evaluation records to rank");

    // Doubled ranks are integers, so replica sums compare exactly.
    const std::size_t k = ranks.cols;
    std::vector<std::int64_t> doubled(ranks.ranks.size());
    for (std::size_t i = 0; i < doubled.size(); ++i) doubled[i] = std::llround(2.0 * ranks.ranks[i]);
    std::int64_t observed = 0;
    for (std::size_t i = 0; i < ranks.rows; ++i) observed += doubled[i * k + ranks.impermissible];

    // Permuting a row's losses across outcomes and reading the slot of the
    // impermissible outcome is the first Fisher-Yates step with that slot
    // last: a uniform draw from the row's rank multiset.
    auto count_range = [&](std::size_t begin, std::size_t end) {
        std::size_t hits = 0;
        for (std::size_t b = begin; b < end; ++b) {
            auto rng = make_stream(seed, StreamTag::Permutation, b);
            std::int64_t sum = 0;
            const std::int64_t* row = doubled.data();
            for (std::size_t i = 0; i < ranks.rows; ++i, row += k) sum += row[uniform_below(rng, k)];
            if (sum >= observed) ++hits;
        }
        return hits;
    };

    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, permutations));
    std::size_t hits = 0;
    if (workers <= 1) {
        hits = count_range(0, permutations);
    } else {
        std::vector<std::size_t> partial(workers, 0);
        std::vector<std::thread> pool;
        const std::size_t chunk = (permutations + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t begin = std::min(permutations, w * chunk);
            const std::size_t end = std::min(permutations, begin + chunk);
            pool.emplace_back([&, w, begin, end] { partial[w] = count_range(begin, end); });
        }
        for (auto& t : pool) t.join();
        hits = std::accumulate(partial.begin(), partial.end(), std::size_t{0});
    }

    TestResult r;
    r.method = TestMethod::RankPermutation;
    r.statistic = static_cast<double>(observed) / (2.0 * static_cast<double>(ranks.rows));
    r.p_value = (1.0 + static_cast<double>(hits)) / (static_cast<double>(permutations) + 1.0);
    r.n_effective = ranks.rows;
    return r;
}

TestResult rank_normal_test(const RowRanks& ranks) {
    if (ranks.rows == 0) fail(ErrorCode::TooFewSamples, "no evaluation records to rank");
    const double k = static_cast<double>(ranks.cols);
    const double center = (k + 1.0) / 2.0;  // (M+2)/2
    const double n = static_cast<double>(ranks.rows);
    double sum_rank = 0.0;
    double sum_var = 0.0;
    for (std::size_t i = 0; i < ranks.rows; ++i) {
        sum_rank += ranks.impermissible_rank(i);
        double v = 0.0;
        for (std::size_t j = 0; j < ranks.cols; ++j) {
            const double d = ranks.at(i, j) - center;
            v += d * d;
        }
        sum_var += v / k;
    }
    TestResult r;
    r.method = TestMethod::RankNormal;
    r.statistic = sum_rank / n;
    r.n_effective = ranks.rows;
    if (sum_var <= 0.0) {
        r.p_value = 1.0;
        r.notes.push_back("every row fully tied; statistic equals its null value");
        return r;
    }
    const double z = (r.statistic - center) / std::sqrt(sum_var / (n * n));
    r.p_value = std::clamp(std_normal_sf(z), 0.0, 1.0);
    r.notes.push_back("z=" + std::to_string(z));
    return r;
}

RankSummary summarize_ranks(const LossMatrix& matrix, const RowRanks& ranks) {
    RankSummary s;
    const std::size_t k = matrix.cols();
    s.m = k - 1;
    s.null_mean = (static_cast<double>(k) + 1.0) / 2.0;
    std::vector<double> counts(k, 0.0);
    double sum_rank = 0.0;
    const std::size_t imp = matrix.impermissible_column();
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        const auto row = matrix.row(i);
        const double v = row[imp];
        std::size_t less = 0, equal = 0;
        for (double x : row) {
            if (x < v) ++less;
            else if (x == v) ++equal;
        }
        // A tie spreads one record evenly over the positions it spans.
        for (std::size_t pos = less; pos < less + equal; ++pos) counts[pos] += 1.0 / static_cast<double>(equal);
        sum_rank += ranks.impermissible_rank(i);
    }
    const double n = static_cast<double>(matrix.rows());
    s.mean_rank = n > 0 ? sum_rank / n : 0.0;
    for (std::size_t r = 0; r < k; ++r) {
        RankBin bin;
        bin.rank = static_cast<int>(r + 1);
        bin.count = counts[r];
        bin.proportion = n > 0 ? counts[r] / n : 0.0;
        bin.null_expectation = 1.0 / static_cast<double>(k);
        s.bins.push_back(bin);
    }
    return s;
}

DiffSummary summarize_diffs(std::span<const double> all_diffs, std::span<const double> tested, std::size_t bins) {
    DiffSummary s;
    if (!all_diffs.empty()) {
        s.mean = std::accumulate(all_diffs.begin(), all_diffs.end(), 0.0) / static_cast<double>(all_diffs.size());
        std::vector<double> sorted(all_diffs.begin(), all_diffs.end());
        std::sort(sorted.begin(), sorted.end());
        s.median = quantile_linear(sorted, 0.5);
    }
    s.n = tested.size();
    if (tested.empty()) return s;
    const auto [lo_it, hi_it] = std::minmax_element(tested.begin(), tested.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (lo == hi) bins = 1;
    const double width = (hi - lo) / static_cast<double>(bins);
    s.bins.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        s.bins[b].left = lo + width * static_cast<double>(b);
        s.bins[b].right = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double v : tested) {
        std::size_t b = width > 0 ? static_cast<std::size_t>((v - lo) / width) : 0;
        s.bins[std::min(b, bins - 1)].count += 1;
    }
    return s;
}

std::map<std::string, Calibration> fit_calibrations(const EvalDataset& dataset, const FalsificationConfig& config) {
    std::map<std::string, Calibration> out;
    if (!config.calibrate) {
        for (double s : dataset.scores()) {
            if (!(s >= 0.0 && s <= 1.0))
                fail(ErrorCode::ConfigError,
                     "uncalibrated mode needs scores in [0, 1]; enable calibration for raw scores");
        }
        for (const auto& o : dataset.outcomes()) out.emplace(o.name, IdentityCalibration{o.name});
        return out;
    }
    if (!dataset.is_split())
        fail(ErrorCode::ConfigError, "calibration needs a calibration split; split the dataset or pass a role column");
    const auto cal_rows = dataset.indices(SplitRole::Calibration);
    std::vector<double> scores;
    scores.reserve(cal_rows.size());
    for (std::size_t i : cal_rows) scores.push_back(dataset.scores()[i]);
    for (std::size_t j = 0; j < dataset.outcome_count(); ++j) {
        const auto& name = dataset.outcomes()[j].name;
        const auto all = dataset.labels(j);
        std::vector<std::uint8_t> labels;
        labels.reserve(cal_rows.size());
        for (std::size_t i : cal_rows) labels.push_back(all[i]);
        out.emplace(name, fit_platt(scores, labels, config.platt, name));
    }
    return out;
}

namespace {

FalsificationReport start_report(const EvalDataset& run, Procedure procedure, const FalsificationConfig& config,
                                 std::map<std::string, Calibration>& calibrations) {
    FalsificationReport rep;
    rep.procedure = procedure;
    rep.config = config;
    rep.dataset_fingerprint = run.fingerprint();
    rep.impermissible = run.outcomes()[run.impermissible_index()].name;
    for (const auto& o : run.outcomes()) {
        if (o.role == OutcomeRole::Permissible) rep.permissibles.push_back(o.name);
    }
    calibrations = fit_calibrations(run, config);
    for (const auto& o : run.outcomes()) rep.calibration_audit.push_back(calibrations.at(o.name));
    rep.losses = build_loss_matrix(run, calibrations, config.loss_kind, &rep.loss_row_ids);
    rep.n = rep.losses->rows();
    if (rep.n == 0) fail(ErrorCode::TooFewSamples, "evaluation split is empty");
    return rep;
}

Verdict decide(double p, double alpha) { return p <= alpha ? Verdict::Discriminant : Verdict::Indiscriminant; }

}  // namespace

FalsificationReport run_single_proxy(const EvalDataset& dataset, const std::string& permissible,
                                     const std::string& impermissible, const FalsificationConfig& config) {
    config.validate(Procedure::SingleProxy);
    const std::vector<std::string> perms{permissible};
    const EvalDataset run = dataset.select(perms, impermissible);

    std::map<std::string, Calibration> calibrations;
    FalsificationReport rep = start_report(run, Procedure::SingleProxy, config, calibrations);
    const LossMatrix& m = *rep.losses;
    const std::size_t imp = m.impermissible_column();
    const std::size_t perm = imp == 0 ? 1 : 0;

    std::vector<double> diffs(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) diffs[i] = m(i, imp) - m(i, perm);

    rep.diagnostics = diagnose(diffs);
    bool use_t = false;
    switch (config.single_proxy_mode) {
        case SingleProxyMode::TTest: use_t = true; break;
        case SingleProxyMode::Wilcoxon: use_t = false; break;
        case SingleProxyMode::Auto: use_t = rep.diagnostics->recommendation == Recommendation::TTest; break;
    }
    rep.test = use_t ? t_test_one_sided_greater(diffs) : wilcoxon_signed_rank(diffs, config.wilcoxon_mode);
    if (config.single_proxy_mode == SingleProxyMode::Auto)
        rep.test.notes.push_back(std::string("auto mode: diagnostics recommended ") +
                                 std::string(to_string(rep.diagnostics->recommendation)));

    std::vector<double> tested;
    if (use_t) {
        tested = diffs;
    } else {
        for (double d : diffs)
            if (d != 0.0) tested.push_back(d);
    }
    rep.diff_summary = summarize_diffs(diffs, tested, config.histogram_bins);
    rep.verdict = decide(rep.test.p_value, config.alpha);
    return rep;
}

FalsificationReport run_multi_proxy(const EvalDataset& dataset, const std::vector<std::string>& permissibles,
                                    const std::string& impermissible, const FalsificationConfig& config) {
    config.validate(Procedure::MultiProxy);
    const EvalDataset run = dataset.select(permissibles, impermissible);

    std::map<std::string, Calibration> calibrations;
    FalsificationReport rep = start_report(run, Procedure::MultiProxy, config, calibrations);
    const RowRanks ranks = rank_rows(*rep.losses);
    rep.test = config.multi_proxy_mode == MultiProxyMode::Permutation
                   ? rank_permutation_test(ranks, config.permutations, config.seed, config.threads)
                   : rank_normal_test(ranks);
    rep.rank_summary = summarize_ranks(*rep.losses, ranks);
    rep.verdict = decide(rep.test.p_value, config.alpha);
    return rep;
}

std::vector<std::filesystem::path> emit_plot_data(const FalsificationReport& report,
                                                  const std::filesystem::path& out_dir,
                                                  std::string_view manifest_hash) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create '" + out_dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    auto open = [&](const std::string& name) {
        const auto path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
        if (!manifest_hash.empty()) out << "# manifest: " << manifest_hash << '\n';
        written.push_back(path);
        return out;
    };
    char buf[128];
    if (report.rank_summary) {
        auto out = open("rank_histogram.csv");
        out << "rank,count,proportion,null_expectation\n";
        for (const auto& b : report.rank_summary->bins) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", b.rank, b.count, b.proportion,
                          b.null_expectation);
            out << buf;
        }
    }
    if (report.diff_summary) {
        auto out = open("diff_histogram.csv");
        out << "bin_left,bin_right,count\n";
        for (const auto& b : report.diff_summary->bins) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%zu\n", b.left, b.right, b.count);
            out << buf;
        }
    }
    return written;
}

}  // namespace falsifier
