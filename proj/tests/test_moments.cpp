#include "doctest.h"

#include <cmath>
#include <vector>

#include "negmem/covariance.hpp"
#include "negmem/moments.hpp"

using namespace negmem;

namespace {

// Literal double-sum implementations of the variance and covariance
// identities; the production code must match these exactly.
double var_brute(const CovarianceModel& model, std::uint64_t t) {
    double acc = static_cast<double>(t) * model.at(0);
    for (std::uint64_t i = 2; i <= t; ++i) {
        for (std::uint64_t j = 1; j < i; ++j) {
            acc += 2.0 * model.at(static_cast<std::int64_t>(i - j));
        }
    }
    return acc;
}

double cov_brute(const CovarianceModel& model, std::uint64_t s, std::uint64_t t) {
    double acc = 0.0;
    for (std::uint64_t i = t + 1; i <= s; ++i) {
        for (std::uint64_t j = 1; j <= t; ++j) {
            acc += model.at(static_cast<std::int64_t>(i - j));
        }
    }
    return acc;
}

// Simpson quadrature of 2 * x^p * phi(x) over [0, 12]: E|N(0,1)|^p.
double abs_moment_quadrature(double p) {
    const int n = 1 << 16;
    const double hi = 12.0;
    const double step = hi / n;
    auto f = [&](double x) {
        return 2.0 * std::pow(x, p) * std::exp(-0.5 * x * x) /
               std::sqrt(2.0 * 3.14159265358979323846);
    };
    double acc = f(0.0) + f(hi);
    for (int i = 1; i < n; ++i) acc += f(step * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * step / 3.0;
}

}  // namespace

TEST_CASE("var_s matches the literal double sum and the fgn identity") {
    for (double h : {0.1, 0.25, 0.4}) {
        const auto model = CovarianceModel::fgn(h, 1.0);
        SecondOrderTable table(model, 64);
        for (std::uint64_t t = 0; t <= 64; ++t) {
            CHECK(table.var_s(t) ==
                  doctest::Approx(var_brute(model, t)).epsilon(1e-12));
        }
    }

    const auto model = CovarianceModel::fgn(0.25, 1.0);
    CHECK(var_s(model, 0) == 0.0);
    CHECK(var_s(model, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(var_s(model, 2) == doctest::Approx(std::pow(2.0, 0.5)).epsilon(1e-13));
    CHECK(var_s(model, 1000) == doctest::Approx(std::pow(1000.0, 0.5)).epsilon(1e-10));
}

TEST_CASE("fgn cumulative variance is exact across the horizon") {
    for (double h : {0.1, 0.25, 0.4}) {
        const auto model = CovarianceModel::fgn(h, 1.0);
        SecondOrderTable table(model, 512);
        for (std::uint64_t t = 1; t <= 512; ++t) {
            const double expected = std::pow(static_cast<double>(t), 2.0 * h);
            CHECK(std::abs(table.var_s(t) - expected) / expected < 1e-10);
        }
    }
    // Nonunit scale multiplies straight through.
    SecondOrderTable scaled(CovarianceModel::fgn(0.25, 2.5), 100);
    CHECK(scaled.var_s(100) == doctest::Approx(2.5 * std::pow(100.0, 0.5)).epsilon(1e-12));
}

TEST_CASE("cov_increment_past matches the literal double sum") {
    const auto model = CovarianceModel::fgn(0.3, 1.0);
    SecondOrderTable table(model, 64);
    for (std::uint64_t t = 1; t < 64; ++t) {
        for (std::uint64_t s = t + 1; s <= 64; ++s) {
            const double brute = cov_brute(model, s, t);
            const double fast = table.cov_increment_past(s, t);
            CHECK(fast == doctest::Approx(brute).epsilon(1e-11));
        }
    }
}

TEST_CASE("cov_increment_past spot values") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    CHECK(cov_increment_past(model, 2, 1) == doctest::Approx(model.at(1)).epsilon(1e-13));

    // s = 2t: (1/2)((2t)^{2H} - 2 t^{2H}), negative under negative memory.
    const std::uint64_t t = 500;
    const double expected = 0.5 * (std::pow(1000.0, 0.5) - 2.0 * std::pow(500.0, 0.5));
    const double got = cov_increment_past(model, 2 * t, t);
    CHECK(got == doctest::Approx(expected).epsilon(1e-10));
    CHECK(got < 0.0);

    // Independent increments: the past tells you nothing.
    const auto white = CovarianceModel::explicit_sequence({1.0}, true);
    SecondOrderTable wtable(white, 32);
    for (std::uint64_t tt = 1; tt < 32; ++tt) {
        for (std::uint64_t ss = tt + 1; ss <= 32; ++ss) {
            CHECK(wtable.cov_increment_past(ss, tt) == 0.0);
        }
    }
}

TEST_CASE("stationarity identity ties cov to three variances") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    SecondOrderTable table(model, 512);
    for (std::uint64_t t = 1; t < 512; t += 7) {
        for (std::uint64_t s = t + 1; s <= 512; s += 11) {
            const double lhs = table.cov_increment_past(s, t);
            const double rhs =
                0.5 * (table.var_s(s) - table.var_s(t) - table.var_s(s - t));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("rho closed form for fgn") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    SecondOrderTable table(model, 1000);
    CHECK(table.rho(500, 500) == 1.0);

    // cov(S_s, S_t)/var(S_t) = (s^{2H} + t^{2H} - (s-t)^{2H}) / (2 t^{2H}).
    const double expected =
        (std::pow(1000.0, 0.5) + std::pow(500.0, 0.5) - std::pow(500.0, 0.5)) /
        (2.0 * std::pow(500.0, 0.5));
    CHECK(table.rho(1000, 500) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    // Negative memory keeps rho strictly below 1 away from the diagonal.
    for (std::uint64_t t : {1ULL, 10ULL, 100ULL, 499ULL}) {
        for (std::uint64_t s = t + 1; s <= 1000; s += 97) {
            CHECK(table.rho(s, t) < 1.0);
        }
    }
    CHECK_THROWS_AS(table.rho(10, 0), std::invalid_argument);
}

TEST_CASE("gamma and gaussian absolute moments") {
    CHECK(lanczos_gamma(0.5) ==
          doctest::Approx(std::sqrt(3.14159265358979323846)).epsilon(1e-12));
    CHECK(lanczos_gamma(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lanczos_gamma(5.0) == doctest::Approx(24.0).epsilon(1e-12));
    CHECK(lanczos_gamma(2.5) ==
          doctest::Approx(0.75 * std::sqrt(3.14159265358979323846)).epsilon(1e-12));

    CHECK(abs_moment_constant(2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(abs_moment_constant(1.0) ==
          doctest::Approx(std::sqrt(2.0 / 3.14159265358979323846)).epsilon(1e-12));
    CHECK(abs_moment_constant(4.0) == doctest::Approx(3.0).epsilon(1e-12));

    // Quadrature oracle across the exponents the ledger actually uses.
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
        CHECK(abs_moment_constant(p) ==
              doctest::Approx(abs_moment_quadrature(p)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(abs_moment_constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(abs_moment_constant(-1.0), std::invalid_argument);
}

TEST_CASE("q_of_t sums the exact absolute moments") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    CHECK(q_of_t(model, 0, 2.0) == 0.0);

    // alpha = 2: C_2 = 1 and E|S_t|^2 = var(S_t) = t^{1/2}.
    double direct = 0.0;
    for (int t = 1; t <= 100; ++t) direct += std::pow(static_cast<double>(t), 0.5);
    CHECK(q_of_t(model, 100, 2.0) == doctest::Approx(direct).epsilon(1e-12));

    // alpha = 3: p = 3/2; oracle by quadrature of E|X|^{3/2}, X ~ N(0, t^{1/2}).
    double oracle = 0.0;
    for (int t = 1; t <= 20; ++t) {
        const double sd = std::pow(static_cast<double>(t), 0.25);
        oracle += abs_moment_quadrature(1.5) * std::pow(sd, 1.5);
    }
    CHECK(q_of_t(model, 20, 3.0) == doctest::Approx(oracle).epsilon(1e-9));

    CHECK_THROWS_AS(q_of_t(model, 10, 1.0), std::invalid_argument);
}

TEST_CASE("q_of_t scales like T^{H(1 + 1/(alpha-1)) + 1}") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    SecondOrderTable table(model, 8192);
    for (std::uint64_t t = 256; t <= 8192; t *= 2) {
        const double ratio = q_of_t(table, t, 2.0) / std::pow(static_cast<double>(t), 1.5);
        CHECK(ratio > 0.5);
        CHECK(ratio < 0.8);
    }
}

TEST_CASE("analytic profit terms: white noise collapses to EI1") {
    const auto white = CovarianceModel::explicit_sequence({1.0}, true);
    const auto terms = analytic_profit_terms(white, 60, 2.0, 0.0);
    CHECK(terms.ei1 > 0.0);
    CHECK(terms.ei2 == 0.0);
    CHECK(terms.ei3 == doctest::Approx(terms.ei1).epsilon(1e-12));
    CHECK(std::abs(terms.lower_bound) <= 1e-12 * terms.ei1);
}

TEST_CASE("analytic profit terms: negative memory leaves a margin") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    const auto terms = analytic_profit_terms(model, 600, 2.0, 0.01);
    CHECK(terms.ei1 > 0.0);
    CHECK(terms.ei2 == doctest::Approx(0.01 * terms.ei1).epsilon(1e-15));
    CHECK(terms.ei4_bound == terms.ei2);
    CHECK(terms.ei3 < terms.ei1);
    CHECK(terms.lower_bound > 0.0);
}

TEST_CASE("analytic profit terms: heavy friction flips the bound") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    for (double lambda : {0.5, 0.7, 2.0}) {
        const auto terms = analytic_profit_terms(model, 120, 2.0, lambda);
        CHECK(terms.lower_bound < 0.0);
    }
}

TEST_CASE("analytic profit terms match a literal rho-weighted sum") {
    const auto model = CovarianceModel::fgn(0.3, 1.0);
    const std::uint64_t horizon = 12;
    const std::uint64_t m = horizon / 2;
    const double p = 2.0;  // alpha = 2
    double ei3 = 0.0;
    for (std::uint64_t s = m + 1; s <= horizon; ++s) {
        for (std::uint64_t t = 1; t <= m; ++t) {
            const double var_t = var_brute(model, t);
            const double rho_st = cov_brute(model, s, t) / var_t + 1.0;
            ei3 += rho_st * abs_moment_constant(p) * std::pow(var_t, 0.5 * p);
        }
    }
    ei3 /= static_cast<double>(m);
    const auto terms = analytic_profit_terms(model, horizon, 2.0, 0.0);
    CHECK(terms.ei3 == doctest::Approx(ei3).epsilon(1e-10));
}

TEST_CASE("analytic profit terms reject horizons off the 6-grid") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    CHECK_THROWS_AS(analytic_profit_terms(model, 100, 2.0, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(analytic_profit_terms(model, 0, 2.0, 0.01), std::invalid_argument);
}

TEST_CASE("certify_bounds produces exact fgn witnesses") {
    const auto model = CovarianceModel::fgn(0.25, 1.0);
    const auto cert = certify_bounds(model, 1200);

    CHECK(cert.hurst == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(cert.b1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(cert.b2 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(cert.d1 < 0.0);           // every grid covariance is negative
    CHECK(cert.k == 1.0);
    CHECK(cert.t4 == 1);
    CHECK(cert.rho_max < 1.0);
    CHECK(cert.r > 0.0);
    CHECK(cert.eta == doctest::Approx(2.0 / 3.0));
    CHECK(cert.epsilon > 0.0);
    CHECK(cert.epsilon < 1.0);
    CHECK(cert.u_four_thirds > 0.0);
    CHECK_FALSE(cert.note.empty());
}

TEST_CASE("certify_bounds rejects models outside the assumptions") {
    const auto iid = CovarianceModel::explicit_sequence({1.0}, true);
    CHECK_THROWS_AS(certify_bounds(iid, 1200), CertificationError);
    CHECK_THROWS_AS(certify_bounds(CovarianceModel::fgn(0.25), 999),
                    std::invalid_argument);
}
