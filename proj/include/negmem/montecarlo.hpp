#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "negmem/covariance.hpp"
#include "negmem/market.hpp"
#include "negmem/moments.hpp"
#include "negmem/paths.hpp"
#include "negmem/strategies.hpp"

namespace negmem {

struct TermStat {
    double mean = 0.0;
    double se = 0.0;
};

// Sample statistics of the terminal cash and, for the contrarian strategy,
// of the pathwise decomposition X_T = I1 - I2 - I3 - I4.
struct ProfitEstimate {
    std::uint64_t horizon = 0;
    std::uint64_t n_paths = 0;
    TermStat cash;
    bool has_terms = false;
    TermStat i1, i2, i3, i4;
    double gstar_margin = 0.0;  // min over paths of (bound - X_T); >= 0 always
};

ProfitEstimate estimate_expected_profit(const CovarianceModel& model,
                                        const Strategy& strategy,
                                        const MarketParams& params, std::uint64_t horizon,
                                        std::uint64_t n_paths, std::uint64_t master_seed,
                                        const SampleOptions& options = {});

struct HorizonEstimate {
    std::uint64_t horizon = 0;
    std::uint64_t n_paths = 0;
    double mean = 0.0;
    double se = 0.0;
    double analytic_lower = 0.0;  // L(T) from the exact profit terms
    double upper_env = 0.0;       // C * Q(T) with C from the conjugate G*
    bool positive_mean = false;
};

struct GrowthReport {
    std::vector<HorizonEstimate> horizons;
    double fitted_slope = 0.0;
    double slope_ci_lo = 0.0;
    double slope_ci_hi = 0.0;
    bool fit_valid = false;  // needs >= 2 horizons with positive means
    std::vector<std::uint64_t> nonpositive_horizons;
    double analytic_lower_slope = 0.0;
    double upper_env_slope = 0.0;
    double theory_exponent = 0.0;  // (chi/2 + 1)(1 + 1/(alpha-1)) + 1
    double alpha = 0.0;
    double lambda = 0.0;
};

struct GrowthOptions {
    SampleOptions sample;
    bool bootstrap_ci = false;      // percentile bootstrap instead of delta method
    std::uint64_t bootstrap_rounds = 200;
};

// Weighted log-log fit of mean X_T against T, horizon by horizon, with the
// analytic lower bound and upper envelope fitted alongside.
GrowthReport fit_growth_exponent(const CovarianceModel& model, const Strategy& strategy,
                                 const MarketParams& params,
                                 const std::vector<std::uint64_t>& horizons,
                                 std::uint64_t n_paths, std::uint64_t master_seed,
                                 const GrowthOptions& options = {});

struct LambdaSweepRow {
    double lambda = 0.0;
    double mean = 0.0;
    double se = 0.0;
};

struct LambdaSweep {
    std::vector<LambdaSweepRow> rows;
    // Friction is linear in lambda path by path, so the sign flip of the mean
    // is exact: mean gross / mean power sum.
    double threshold_lambda = 0.0;
    bool has_threshold = false;
    std::optional<double> epsilon_over_3;  // from a BoundsCertificate, if given
};

// Common random numbers across lambda values: one set of paths, one set of
// strategies, friction rescaled per lambda.
LambdaSweep lambda_sweep(const CovarianceModel& model, const Strategy& strategy,
                         double alpha, std::uint64_t horizon,
                         const std::vector<double>& lambdas, std::uint64_t n_paths,
                         std::uint64_t master_seed, const SampleOptions& options = {},
                         const BoundsCertificate* certificate = nullptr);

}  // namespace negmem
