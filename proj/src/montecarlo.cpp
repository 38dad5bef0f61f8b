#include "negmem/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "negmem/rng.hpp"
#include "negmem/util.hpp"

namespace negmem {

namespace {

TermStat reduce_stat(std::span<const double> slots) {
    const std::size_t n = slots.size();
    KahanSum sum;
    for (double x : slots) sum.add(x);
    const double mean = sum.value() / static_cast<double>(n);
    KahanSum sq;
    for (double x : slots) sq.add((x - mean) * (x - mean));
    const double se =
        n > 1 ? std::sqrt(sq.value() / (static_cast<double>(n) * (static_cast<double>(n) - 1.0)))
              : 0.0;
    return {mean, se};
}

struct WeightedFit {
    double slope = 0.0;
    double slope_se = 0.0;
    bool valid = false;
};

WeightedFit weighted_loglog_fit(const std::vector<double>& ts, const std::vector<double>& ys,
                                const std::vector<double>& ws) {
    WeightedFit fit;
    if (ts.size() < 2) return fit;
    double sw = 0, swx = 0, swy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sw += ws[i];
        swx += ws[i] * std::log(ts[i]);
        swy += ws[i] * std::log(ys[i]);
    }
    const double mx = swx / sw;
    const double my = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double dx = std::log(ts[i]) - mx;
        sxx += ws[i] * dx * dx;
        sxy += ws[i] * dx * (std::log(ys[i]) - my);
    }
    if (!(sxx > 0.0)) return fit;
    fit.slope = sxy / sxx;
    fit.slope_se = 1.0 / std::sqrt(sxx);  // exact for known per-point variances
    fit.valid = true;
    return fit;
}

// Per-path ledger pieces shared by the estimator and the lambda sweep.
struct PathLedger {
    double gross = 0.0;      // -sum phi_u S_u
    double power_sum = 0.0;  // sum |phi_u|^alpha (friction / lambda)
};

PathLedger settle_light(std::span<const double> prices, std::span<const double> phi,
                        double alpha) {
    PathLedger out;
    KahanSum gross, power;
    for (std::size_t u = 0; u < phi.size(); ++u) {
        gross.add(-phi[u] * prices[u]);
        power.add(std::pow(std::abs(phi[u]), alpha));
    }
    out.gross = gross.value();
    out.power_sum = power.value();
    return out;
}

}  // namespace

ProfitEstimate estimate_expected_profit(const CovarianceModel& model,
                                        const Strategy& strategy,
                                        const MarketParams& params, std::uint64_t horizon,
                                        std::uint64_t n_paths, std::uint64_t master_seed,
                                        const SampleOptions& options) {
    params.validate();
    if (n_paths < 100) {
        throw std::invalid_argument("estimate_expected_profit: need at least 100 paths");
    }

    PathGenerator gen(model, horizon, options.sampler, options.allow_fallback);
    const bool terms = strategy.kind == StrategyKind::Contrarian;
    const std::uint64_t active_end = 3 * (horizon / 6);

    std::vector<double> cash(n_paths), margin(n_paths);
    std::vector<double> s1, s2, s3, s4;
    if (terms) {
        s1.resize(n_paths);
        s2.resize(n_paths);
        s3.resize(n_paths);
        s4.resize(n_paths);
    }

    for_each_path(gen, master_seed, n_paths, options.workers,
                  [&](std::uint64_t i, std::span<const double>, std::span<const double> s) {
                      const auto phi = trade_speeds(strategy, s, horizon, i);
                      KahanSum gross, friction, bound;
                      KahanSum i1, i2, i3, i4;
                      for (std::uint64_t u = 0; u <= horizon; ++u) {
                          const double trade = -phi[u] * s[u];
                          const double cost =
                              params.lambda * std::pow(std::abs(phi[u]), params.alpha);
                          gross.add(trade);
                          friction.add(cost);
                          bound.add(gstar(-s[u], params));
                          if (terms) {
                              if (u <= active_end) {
                                  i1.add(trade);
                                  i2.add(cost);
                              } else {
                                  i3.add(-trade);
                                  i4.add(cost);
                              }
                          }
                      }
                      const double x = gross.value() - friction.value();
                      cash[i] = x;
                      margin[i] = bound.value() - x;
                      if (terms) {
                          s1[i] = i1.value();
                          s2[i] = i2.value();
                          s3[i] = i3.value();
                          s4[i] = i4.value();
                      }
                  });

    ProfitEstimate est;
    est.horizon = horizon;
    est.n_paths = n_paths;
    est.cash = reduce_stat(cash);
    est.gstar_margin = *std::min_element(margin.begin(), margin.end());
    est.has_terms = terms;
    if (terms) {
        est.i1 = reduce_stat(s1);
        est.i2 = reduce_stat(s2);
        est.i3 = reduce_stat(s3);
        est.i4 = reduce_stat(s4);
    }
    return est;
}

GrowthReport fit_growth_exponent(const CovarianceModel& model, const Strategy& strategy,
                                 const MarketParams& params,
                                 const std::vector<std::uint64_t>& horizons,
                                 std::uint64_t n_paths, std::uint64_t master_seed,
                                 const GrowthOptions& options) {
    params.validate();
    if (horizons.size() < 4) {
        throw std::invalid_argument("fit_growth_exponent: need at least 4 horizons");
    }
    for (std::size_t i = 1; i < horizons.size(); ++i) {
        if (horizons[i] <= horizons[i - 1]) {
            throw std::invalid_argument("fit_growth_exponent: horizons must be increasing");
        }
    }
    if (static_cast<double>(horizons.back()) <
        31.62 * static_cast<double>(horizons.front())) {
        throw std::invalid_argument(
            "fit_growth_exponent: horizons must span at least 1.5 decades");
    }

    const bool contrarian = strategy.kind == StrategyKind::Contrarian;
    const double a = params.alpha;
    const double gstar_const = (a - 1.0) / a * std::pow(a, 1.0 / (1.0 - a)) *
                               std::pow(params.lambda, 1.0 / (1.0 - a));

    SecondOrderTable table(model, horizons.back());

    GrowthReport report;
    report.alpha = params.alpha;
    report.lambda = params.lambda;
    const double chi = model.chi();
    report.theory_exponent =
        (chi / 2.0 + 1.0) * (1.0 + 1.0 / (params.alpha - 1.0)) + 1.0;

    std::vector<std::vector<double>> cash_slots;  // kept for the bootstrap
    for (std::uint64_t horizon : horizons) {
        // Per-horizon seed; paths at different horizons are independent.
        const std::uint64_t seed = derive_stream_seed(master_seed, horizon);
        const auto est = estimate_expected_profit(model, strategy, params, horizon, n_paths,
                                                  seed, options.sample);
        HorizonEstimate h;
        h.horizon = horizon;
        h.n_paths = n_paths;
        h.mean = est.cash.mean;
        h.se = est.cash.se;
        h.upper_env = gstar_const * q_of_t(table, horizon, params.alpha);
        h.analytic_lower =
            (contrarian && horizon % 6 == 0)
                ? analytic_profit_terms(table, horizon, params.alpha, params.lambda).lower_bound
                : std::numeric_limits<double>::quiet_NaN();
        h.positive_mean = h.mean > 0.0;
        if (!h.positive_mean) report.nonpositive_horizons.push_back(horizon);
        report.horizons.push_back(h);

        if (options.bootstrap_ci) {
            std::vector<double> slots(n_paths);
            PathGenerator gen(model, horizon, options.sample.sampler,
                              options.sample.allow_fallback);
            for_each_path(gen, seed, n_paths, options.sample.workers,
                          [&](std::uint64_t i, std::span<const double>,
                              std::span<const double> s) {
                              const auto phi = trade_speeds(strategy, s, horizon, i);
                              const auto lg = settle_light(s, phi, params.alpha);
                              slots[i] = lg.gross - params.lambda * lg.power_sum;
                          });
            cash_slots.push_back(std::move(slots));
        }
    }

    std::vector<double> ts, ys, ws;
    for (const auto& h : report.horizons) {
        if (h.positive_mean && h.se > 0.0) {
            ts.push_back(static_cast<double>(h.horizon));
            ys.push_back(h.mean);
            ws.push_back((h.mean / h.se) * (h.mean / h.se));
        }
    }
    const auto fit = weighted_loglog_fit(ts, ys, ws);
    report.fit_valid = fit.valid;
    if (fit.valid) {
        report.fitted_slope = fit.slope;
        report.slope_ci_lo = fit.slope - 1.959964 * fit.slope_se;
        report.slope_ci_hi = fit.slope + 1.959964 * fit.slope_se;
    }

    if (options.bootstrap_ci && fit.valid && !cash_slots.empty()) {
        std::vector<double> slopes;
        slopes.reserve(options.bootstrap_rounds);
        for (std::uint64_t round = 0; round < options.bootstrap_rounds; ++round) {
            Xoshiro256pp rng(derive_stream_seed(master_seed, 0xb007'0000ULL + round));
            std::vector<double> bts, bys, bws;
            for (std::size_t hi = 0; hi < report.horizons.size(); ++hi) {
                const auto& slots = cash_slots[hi];
                KahanSum sum;
                std::vector<double> draw(slots.size());
                for (std::size_t i = 0; i < slots.size(); ++i) {
                    const std::size_t pick = static_cast<std::size_t>(
                        rng.next() % static_cast<std::uint64_t>(slots.size()));
                    draw[i] = slots[pick];
                    sum.add(draw[i]);
                }
                const auto st = reduce_stat(draw);
                if (st.mean > 0.0 && st.se > 0.0) {
                    bts.push_back(static_cast<double>(report.horizons[hi].horizon));
                    bys.push_back(st.mean);
                    bws.push_back((st.mean / st.se) * (st.mean / st.se));
                }
            }
            const auto bfit = weighted_loglog_fit(bts, bys, bws);
            if (bfit.valid) slopes.push_back(bfit.slope);
        }
        if (slopes.size() >= 40) {
            std::sort(slopes.begin(), slopes.end());
            report.slope_ci_lo = slopes[static_cast<std::size_t>(0.025 * slopes.size())];
            report.slope_ci_hi = slopes[static_cast<std::size_t>(0.975 * slopes.size())];
        }
    }

    // Analytic curves carry no sampling noise; plain OLS fits them.
    {
        std::vector<double> lts, lys, lws;
        for (const auto& h : report.horizons) {
            if (std::isfinite(h.analytic_lower) && h.analytic_lower > 0.0) {
                lts.push_back(static_cast<double>(h.horizon));
                lys.push_back(h.analytic_lower);
                lws.push_back(1.0);
            }
        }
        const auto lfit = weighted_loglog_fit(lts, lys, lws);
        report.analytic_lower_slope =
            lfit.valid ? lfit.slope : std::numeric_limits<double>::quiet_NaN();

        std::vector<double> uts, uys, uws;
        for (const auto& h : report.horizons) {
            if (h.upper_env > 0.0) {
                uts.push_back(static_cast<double>(h.horizon));
                uys.push_back(h.upper_env);
                uws.push_back(1.0);
            }
        }
        const auto ufit = weighted_loglog_fit(uts, uys, uws);
        report.upper_env_slope =
            ufit.valid ? ufit.slope : std::numeric_limits<double>::quiet_NaN();
    }

    return report;
}

LambdaSweep lambda_sweep(const CovarianceModel& model, const Strategy& strategy,
                         double alpha, std::uint64_t horizon,
                         const std::vector<double>& lambdas, std::uint64_t n_paths,
                         std::uint64_t master_seed, const SampleOptions& options,
                         const BoundsCertificate* certificate) {
    if (lambdas.empty()) throw std::invalid_argument("lambda_sweep: no lambda values");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0) || (i > 0 && lambdas[i] <= lambdas[i - 1])) {
            throw std::invalid_argument("lambda_sweep: lambdas must be positive ascending");
        }
    }
    if (n_paths < 100) throw std::invalid_argument("lambda_sweep: need at least 100 paths");

    // Friction enters X_T linearly in lambda, so one batch of paths prices
    // every lambda: common random numbers by construction.
    PathGenerator gen(model, horizon, options.sampler, options.allow_fallback);
    std::vector<double> gross(n_paths), power(n_paths);
    for_each_path(gen, master_seed, n_paths, options.workers,
                  [&](std::uint64_t i, std::span<const double>, std::span<const double> s) {
                      const auto phi = trade_speeds(strategy, s, horizon, i);
                      const auto lg = settle_light(s, phi, alpha);
                      gross[i] = lg.gross;
                      power[i] = lg.power_sum;
                  });

    LambdaSweep sweep;
    const auto gross_stat = reduce_stat(gross);
    const auto power_stat = reduce_stat(power);
    for (double lambda : lambdas) {
        std::vector<double> cash(n_paths);
        for (std::uint64_t i = 0; i < n_paths; ++i) cash[i] = gross[i] - lambda * power[i];
        const auto st = reduce_stat(cash);
        sweep.rows.push_back({lambda, st.mean, st.se});
    }
    if (power_stat.mean > 0.0) {
        sweep.threshold_lambda = gross_stat.mean / power_stat.mean;
        sweep.has_threshold = sweep.threshold_lambda > 0.0;
    }
    if (certificate) sweep.epsilon_over_3 = certificate->epsilon / 3.0;
    return sweep;
}

}  // namespace negmem
