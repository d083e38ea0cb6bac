#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "falsifier/calibration.hpp"
#include "falsifier/error.hpp"
#include "oracles.hpp"

using namespace falsifier;

namespace {

struct Sample {
    std::vector<double> s;
    std::vector<std::uint8_t> y;
};

// P(y = 1 | s) = 1 / (1 + exp(a s + b)), s ~ N(0, 1).
Sample sigmoid_sample(std::size_t n, double a, double b, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Sample out;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = nd(rng);
        out.s.push_back(s);
        out.y.push_back(u(rng) < 1.0 / (1.0 + std::exp(a * s + b)) ? 1 : 0);
    }
    return out;
}

std::vector<double> targets(const std::vector<std::uint8_t>& y, bool smoothing) {
    const double pos = static_cast<double>(std::count(y.begin(), y.end(), 1));
    const double neg = static_cast<double>(y.size()) - pos;
    std::vector<double> t;
    for (auto v : y) t.push_back(v ? (smoothing ? (pos + 1) / (pos + 2) : 1.0) : (smoothing ? 1 / (neg + 2) : 0.0));
    return t;
}

}  // namespace

TEST_CASE("platt recovers generating parameters") {
    const auto d = sigmoid_sample(10000, 2.0, -1.0, 42);
    PlattOptions o;
    o.smoothing = false;
    const auto p = fit_platt(d.s, d.y, o, "y");
    CHECK(std::fabs(p.a - 2.0) <= 0.05);
    CHECK(std::fabs(p.b + 1.0) <= 0.05);
    CHECK(p.n_fit == 10000);
    CHECK_FALSE(p.smoothing_applied);
}

TEST_CASE("platt matches the reference MLE") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto d = sigmoid_sample(300 + 20 * seed, 0.5 * seed, 0.3 - 0.1 * seed, seed);
        for (bool smoothing : {true, false}) {
            PlattOptions o;
            o.smoothing = smoothing;
            const auto p = fit_platt(d.s, d.y, o, "y");
            const auto ref = oracle::reference_logistic_mle(d.s, targets(d.y, smoothing));
            CHECK(p.a == doctest::Approx(ref.a).epsilon(1e-7));
            CHECK(p.b == doctest::Approx(ref.b).epsilon(1e-7));
        }
    }
}

TEST_CASE("separable data converges only with smoothing") {
    std::vector<double> s{-3, -2, -1, 1, 2, 3};
    std::vector<std::uint8_t> y{0, 0, 0, 1, 1, 1};
    const auto p = fit_platt(s, y, {}, "y");
    CHECK(std::isfinite(p.a));
    CHECK(p.iterations <= 100);
    CHECK(apply_platt(p, 3.0) > 0.5);
    CHECK(apply_platt(p, -3.0) < 0.5);

    PlattOptions raw;
    raw.smoothing = false;
    try {
        fit_platt(s, y, raw, "y");
        FAIL("expected NoConvergence");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoConvergence);
    }
}

TEST_CASE("single-class labels are rejected") {
    std::vector<double> s{0.1, 0.2};
    std::vector<std::uint8_t> y{1, 1};
    try {
        fit_platt(s, y, {}, "y");
        FAIL("expected SingleClassLabels");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingleClassLabels);
    }
}

TEST_CASE("independent labels give a flat fit") {
    const auto d = sigmoid_sample(5000, 0.0, 0.0, 77);
    const auto p = fit_platt(d.s, d.y, {}, "y");
    const double pos = static_cast<double>(std::count(d.y.begin(), d.y.end(), 1));
    CHECK(std::fabs(p.a) < 0.1);
    CHECK(apply_platt(p, 0.0) == doctest::Approx((pos + 1) / (5000 + 2)).epsilon(0.02));
}

TEST_CASE("fit is invariant to record order") {
    auto d = sigmoid_sample(500, -1.0, 0.5, 5);
    const auto p1 = fit_platt(d.s, d.y, {}, "y");
    std::reverse(d.s.begin(), d.s.end());
    std::reverse(d.y.begin(), d.y.end());
    const auto p2 = fit_platt(d.s, d.y, {}, "y");
    CHECK(p1.a == doctest::Approx(p2.a).epsilon(1e-9));
    CHECK(p1.b == doctest::Approx(p2.b).epsilon(1e-9));
}

TEST_CASE("apply closed forms") {
    PlattParams p;
    CHECK(apply_platt(p, 7.0) == 0.5);
    p.b = std::log(3.0);
    CHECK(apply_platt(p, -2.0) == doctest::Approx(0.25));
    p.a = -1.0;
    p.b = 0.0;
    CHECK(apply_platt(p, 0.0) == 0.5);
    CHECK(apply_platt(p, 1.0) > apply_platt(p, 0.5));
}

TEST_CASE("probabilities are clamped") {
    PlattParams p;
    p.a = -100.0;
    CHECK(apply_platt(p, 50.0) == 1.0 - kProbabilityEpsilon);
    CHECK(apply_platt(p, -50.0) == kProbabilityEpsilon);
    CHECK(calibrate(IdentityCalibration{"y"}, 0.0) == kProbabilityEpsilon);
    CHECK(calibrate(IdentityCalibration{"y"}, 0.4) == 0.4);
    CHECK(calibration_outcome(Calibration{IdentityCalibration{"z"}}) == "z");
}
