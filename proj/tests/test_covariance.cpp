#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "negmem/covariance.hpp"

using namespace negmem;

namespace {

// Second difference of t^{2H} evaluated literally; accurate for small lags
// and used to cross-check the series implementation.
double fgn_direct(double h, double scale, std::uint64_t lag) {
    if (lag == 0) return scale;
    const double a = 2.0 * h;
    const double k = static_cast<double>(lag);
    return scale * 0.5 * (std::pow(k + 1.0, a) - 2.0 * std::pow(k, a) + std::pow(k - 1.0, a));
}

}  // namespace

TEST_CASE("fgn covariance closed-form values") {
    CHECK(fgn_covariance(0.25, 1.0, 0) == 1.0);
    CHECK(fgn_covariance(0.25, 3.5, 0) == 3.5);

    // r(1) = (2^{2H} - 2)/2; the var(S_2) telescoping gives the same number.
    const double r1 = fgn_covariance(0.25, 1.0, 1);
    CHECK(r1 == doctest::Approx(0.5 * (std::pow(2.0, 0.5) - 2.0)).epsilon(1e-15));
    CHECK(r1 == doctest::Approx(-0.29289321881345248).epsilon(1e-14));
    const double var_s2 = 2.0 * fgn_covariance(0.25, 1.0, 0) + 2.0 * r1;
    CHECK(var_s2 == doctest::Approx(std::pow(2.0, 0.5)).epsilon(1e-14));
}

TEST_CASE("fgn series agrees with the literal second difference at small lags") {
    for (double h : {0.1, 0.25, 0.4, 0.49}) {
        for (std::uint64_t lag = 2; lag <= 64; ++lag) {
            const double series = fgn_covariance(h, 1.0, lag);
            const double direct = fgn_direct(h, 1.0, lag);
            CHECK(series == doctest::Approx(direct).epsilon(1e-10));
            CHECK(series < 0.0);
        }
    }
}

TEST_CASE("fgn tail sits inside a fitted power-law sandwich") {
    const double chi = -1.5;  // 2H - 2 at H = 0.25
    double j1 = 0.0, j2 = -1e300;
    for (double lag = 1e3; lag <= 1e6; lag *= 1.1) {
        const auto k = static_cast<std::uint64_t>(lag);
        if (k == 10000) continue;  // held out
        const double ratio = fgn_covariance(0.25, 1.0, k) / std::pow(static_cast<double>(k), chi);
        j1 = std::min(j1, ratio);
        j2 = std::max(j2, ratio);
    }
    CHECK(j1 <= j2);
    CHECK(j2 < 0.0);
    const double r = fgn_covariance(0.25, 1.0, 10000);
    CHECK(r < 0.0);
    CHECK(r >= j1 * std::pow(1e4, chi));
    CHECK(r <= j2 * std::pow(1e4, chi));
    // The asymptotic ratio is scale * H(2H-1) = -0.125 at H = 1/4.
    CHECK(j1 == doctest::Approx(-0.125).epsilon(1e-3));
    CHECK(j2 == doctest::Approx(-0.125).epsilon(1e-3));
}

TEST_CASE("fgn rejects bad parameters") {
    CHECK_THROWS_AS(fgn_covariance(0.5, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(fgn_covariance(0.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(fgn_covariance(0.7, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(fgn_covariance(0.25, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(fgn_covariance(0.25, -1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(CovarianceModel::fgn(0.5), std::invalid_argument);
}

TEST_CASE("covariance sequence is symmetric in the lag") {
    const auto model = CovarianceModel::fgn(0.3, 2.0);
    for (std::int64_t t : {1, 2, 7, 100}) {
        CHECK(model.at(t) == model.at(-t));
    }
    const auto expl = CovarianceModel::explicit_sequence({1.0, -0.5}, true);
    CHECK(expl.at(-1) == expl.at(1));
}

TEST_CASE("partial sums telescope for fgn") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);

    // Direct summation oracle at N = 1.
    const double direct = model.at(0) + 2.0 * model.at(1);
    CHECK(partial_sum(model, 1) == doctest::Approx(direct).epsilon(1e-15));
    CHECK(partial_sum(model, 1) == doctest::Approx(0.41421356237309515).epsilon(1e-14));

    // Telescoped form (N+1)^{2H} - N^{2H}.
    for (std::uint64_t n : {10ULL, 100ULL, 1000ULL, 10000ULL}) {
        const double expected =
            std::pow(static_cast<double>(n + 1), 0.5) - std::pow(static_cast<double>(n), 0.5);
        CHECK(partial_sum(model, n) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("partial sums decay like N^{2H-1}") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    double prev = std::abs(partial_sum(model, 64));
    for (std::uint64_t n = 128; n <= 16384; n *= 2) {
        const double cur = std::abs(partial_sum(model, n));
        CHECK(cur < prev);
        // Halving rate for a doubling of N is 2^{2H-1} = 2^{-1/2}.
        CHECK(cur / prev == doctest::Approx(std::pow(2.0, -0.5)).epsilon(0.02));
        prev = cur;
    }
}

TEST_CASE("explicit compact sequence cancels exactly") {
    const auto model = CovarianceModel::explicit_sequence({1.0, -0.5}, true);
    CHECK(partial_sum(model, 1) == 0.0);
    CHECK(partial_sum(model, 5) == 0.0);
    CHECK(model.at(3) == 0.0);
}

TEST_CASE("explicit sequence without compact support refuses extrapolation") {
    const auto model = CovarianceModel::explicit_sequence({1.0, -0.5}, false);
    CHECK(model.at(1) == -0.5);
    CHECK_THROWS_AS(model.at(2), std::out_of_range);
    CHECK(model.max_lag() == 1);
    CHECK_THROWS_AS(partial_sum(model, 5), std::out_of_range);
}

TEST_CASE("verify_assumption certifies fgn and pins chi = 2H - 2") {
    const auto h025 = verify_assumption(CovarianceModel::fgn(0.25), 10, 100000);
    CHECK(h025.pass);
    CHECK(h025.tail_negative);
    CHECK(h025.chi_fit == doctest::Approx(-1.5).epsilon(0.01 / 1.5));
    CHECK(std::abs(h025.chi_fit + 1.5) < 0.01);
    CHECK(h025.j1 <= h025.j2);
    CHECK(h025.j2 < 0.0);
    CHECK(h025.t0 == 10);

    const auto h01 = verify_assumption(CovarianceModel::fgn(0.1), 10, 100000);
    CHECK(h01.pass);
    CHECK(std::abs(h01.chi_fit + 1.8) < 0.01);
}

TEST_CASE("verify_assumption fails an i.i.d. model on both conditions") {
    const auto iid = CovarianceModel::explicit_sequence({1.0}, true);
    const auto report = verify_assumption(iid, 1, 1000);
    CHECK_FALSE(report.pass);
    CHECK_FALSE(report.tail_negative);
    CHECK_FALSE(report.diagnostic.empty());
}

TEST_CASE("verify_assumption enforces a two-decade window") {
    CHECK_THROWS_AS(verify_assumption(CovarianceModel::fgn(0.25), 10, 500),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        verify_assumption(CovarianceModel::explicit_sequence({1.0, -0.5}, false), 1, 100),
        std::invalid_argument);
}

TEST_CASE("fitted tail attaches to a model copy") {
    const auto model = CovarianceModel::fgn(0.25);
    CHECK(model.chi() == doctest::Approx(-1.5).epsilon(1e-15));

    auto expl = CovarianceModel::explicit_sequence({1.0, -0.4, -0.1}, true);
    CHECK(std::isnan(expl.chi()));
    const auto tagged = expl.with_tail(TailEstimate{-1.4, -0.2, -0.1, 4});
    CHECK(tagged.chi() == doctest::Approx(-1.4));
    CHECK(std::isnan(expl.chi()));  // original untouched
}
