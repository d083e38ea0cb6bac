#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "falsifier/error.hpp"
#include "falsifier/falsify.hpp"
#include "falsifier/simharness.hpp"
#include "oracles.hpp"

using namespace falsifier;

namespace {

LossMatrix random_matrix(std::size_t rows, std::size_t cols, int levels, std::mt19937_64& rng) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < cols; ++j) names.push_back("o" + std::to_string(j));
    LossMatrix m(rows, names, 0, LossKind::LogLoss);
    std::uniform_int_distribution<int> lv(0, levels - 1);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = levels > 0 ? lv(rng) * 0.25 : u(rng);
    return m;
}

SyntheticSpec discriminant_spec(std::size_t n, std::size_t m) {
    SyntheticSpec s;
    s.n = n;
    s.n_calibration = n;
    for (std::size_t j = 0; j < m; ++j) s.outcomes.push_back({"y" + std::to_string(j), OutcomeRole::Permissible, 2.0, 0.0});
    s.outcomes.push_back({"race", OutcomeRole::Impermissible, 0.0, 0.0});
    s.seed = 99;
    return s;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::InternalError;
}

}  // namespace

TEST_CASE("row ranks sum to the invariant on fuzzed matrices") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t cols = 2 + rep % 6;
        const auto m = random_matrix(1 + rep % 13, cols, rep % 3 == 0 ? 0 : 1 + rep % 4, rng);
        const auto r = rank_rows(m);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            double sum = 0.0;
            std::vector<double> row(m.row(i).begin(), m.row(i).end());
            const auto want = oracle::tie_ranks(row);
            for (std::size_t j = 0; j < cols; ++j) {
                sum += r.at(i, j);
                CHECK(r.at(i, j) == want[j]);
            }
            CHECK(sum == static_cast<double>(cols * (cols + 1)) / 2.0);
        }
    }
}

TEST_CASE("permutation p-value agrees with exhaustive enumeration") {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 4; ++rep) {
        const auto m = random_matrix(7, 3, rep % 2 ? 3 : 0, rng);
        const auto r = rank_rows(m);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < r.rows; ++i) rows.push_back({r.at(i, 0), r.at(i, 1), r.at(i, 2)});
        const double exact = oracle::exhaustive_rank_p(rows, 0);
        const std::size_t B = 99999;
        const auto t = rank_permutation_test(r, B, 1000 + rep);
        // (1 + hits) / (B + 1) is within a few binomial sd of the exact tail.
        const double sd = std::sqrt(exact * (1 - exact) / B) + 1.0 / B;
        CHECK(std::fabs(t.p_value - exact) <= 5 * sd);
    }
}

TEST_CASE("permutation test is deterministic and thread independent") {
    std::mt19937_64 rng(2);
    const auto r = rank_rows(random_matrix(150, 4, 0, rng));
    const auto a = rank_permutation_test(r, 999, 5, 1);
    const auto b = rank_permutation_test(r, 999, 5, 4);
    const auto c = rank_permutation_test(r, 999, 5, 1);
    CHECK(a.p_value == b.p_value);
    CHECK(a.p_value == c.p_value);
    CHECK(a.p_value >= 1.0 / 1000.0);
    CHECK(a.method == TestMethod::RankPermutation);
}

TEST_CASE("normal rank approximation matches permutation on tie-free data") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 5; ++rep) {
        auto m = random_matrix(500, 4, 0, rng);
        // Tilt the impermissible column to land p in an informative range.
        for (std::size_t i = 0; i < m.rows(); ++i) m(i, 0) += 0.08 * rep;
        const auto r = rank_rows(m);
        const double pn = rank_normal_test(r).p_value;
        const double pp = rank_permutation_test(r, 19999, 40 + rep).p_value;
        CHECK(std::fabs(pn - pp) <= 0.02);
    }
}

TEST_CASE("fully tied rows give p = 1 under the normal approximation") {
    LossMatrix m(3, {"a", "b", "c"}, 0, LossKind::Brier);
    const auto r = rank_rows(m);
    CHECK(rank_normal_test(r).p_value == 1.0);
}

TEST_CASE("rank summary") {
    std::mt19937_64 rng(3);
    const auto m = random_matrix(40, 4, 2, rng);
    const auto r = rank_rows(m);
    const auto s = summarize_ranks(m, r);
    CHECK(s.m == 3);
    CHECK(s.null_mean == 2.5);
    double total = 0.0, weighted = 0.0;
    for (const auto& b : s.bins) {
        total += b.count;
        weighted += b.count * b.rank;
        CHECK(b.null_expectation == 0.25);
    }
    CHECK(total == doctest::Approx(40.0));
    CHECK(weighted / 40.0 == doctest::Approx(s.mean_rank));
}

TEST_CASE("single-proxy run on designed discriminance") {
    const auto ds = generate(discriminant_spec(300, 1));
    FalsificationConfig cfg;
    const auto rep = run_single_proxy(ds, "y0", "race", cfg);
    CHECK(rep.verdict == Verdict::Discriminant);
    CHECK(rep.n == 300);
    REQUIRE(rep.diagnostics.has_value());
    REQUIRE(rep.diff_summary.has_value());
    CHECK(rep.diff_summary->mean > 0.0);
    CHECK(rep.calibration_audit.size() == 2);
    CHECK_FALSE(rep.test.notes.empty());

    cfg.single_proxy_mode = SingleProxyMode::TTest;
    CHECK(run_single_proxy(ds, "y0", "race", cfg).test.method == TestMethod::TTest);
}

TEST_CASE("identical columns give AllZeroDifferences") {
    std::vector<std::uint8_t> y{0, 1, 0, 1, 1, 0, 1, 0};
    const EvalDataset ds({0.1, 0.9, 0.2, 0.8, 0.7, 0.3, 0.6, 0.4},
                         {{"y", OutcomeRole::Permissible}, {"copy", OutcomeRole::Impermissible}}, {y, y},
                         {SplitRole::Calibration, SplitRole::Calibration, SplitRole::Calibration,
                          SplitRole::Calibration, SplitRole::Evaluation, SplitRole::Evaluation,
                          SplitRole::Evaluation, SplitRole::Evaluation});
    CHECK(code_of([&] { run_single_proxy(ds, "y", "copy", {}); }) == ErrorCode::AllZeroDifferences);
}

TEST_CASE("multi-proxy run, config contract, plot data") {
    const auto ds = generate(discriminant_spec(200, 3));
    FalsificationConfig cfg;
    cfg.permutations = 999;
    cfg.seed = 4;
    const std::vector<std::string> perms{"y0", "y1", "y2"};
    const auto rep = run_multi_proxy(ds, perms, "race", cfg);
    CHECK(rep.verdict == Verdict::Discriminant);
    REQUIRE(rep.rank_summary.has_value());
    CHECK(rep.rank_summary->mean_rank > 2.5);

    const auto dir = std::filesystem::temp_directory_path() / "falsifier_test_plot";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto files = emit_plot_data(rep, dir, "abc");
    REQUIRE(files.size() == 1);
    std::ifstream f(files.front());
    std::string first;
    std::getline(f, first);
    CHECK(first == "# manifest: abc");

    cfg.permutations = 10;
    CHECK(code_of([&] { run_multi_proxy(ds, perms, "race", cfg); }) == ErrorCode::PermutationBudgetTooSmall);
    cfg.permutations = 999;
    cfg.alpha = 1.5;
    CHECK(code_of([&] { run_multi_proxy(ds, perms, "race", cfg); }) == ErrorCode::ConfigError);
}

TEST_CASE("uncalibrated mode needs probability scores") {
    const auto ds = generate(discriminant_spec(50, 1));
    FalsificationConfig cfg;
    cfg.calibrate = false;
    CHECK(code_of([&] { run_single_proxy(ds, "y0", "race", cfg); }) == ErrorCode::ConfigError);
}
