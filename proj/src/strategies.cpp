#include "negmem/strategies.hpp"

#include <cmath>
#include <stdexcept>

#include "negmem/rng.hpp"
#include "negmem/util.hpp"

namespace negmem {

const char* strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::Contrarian: return "contrarian";
        case StrategyKind::Zero: return "zero";
        case StrategyKind::HoldAndLiquidate: return "hold";
        case StrategyKind::RandomLiquidating: return "random";
    }
    return "unknown";
}

StrategyKind strategy_from_name(const std::string& name) {
    if (name == "contrarian") return StrategyKind::Contrarian;
    if (name == "zero") return StrategyKind::Zero;
    if (name == "hold") return StrategyKind::HoldAndLiquidate;
    if (name == "random") return StrategyKind::RandomLiquidating;
    throw std::invalid_argument("unknown strategy: " + name);
}

namespace {

// Fold the float residual of the speed sum into the last nonzero trade so
// membership in the liquidating class is bit-exact.
void zero_total(std::vector<double>& phi) {
    KahanSum total;
    for (double p : phi) total.add(p);
    if (total.value() == 0.0) return;
    for (std::size_t u = phi.size(); u-- > 0;) {
        if (phi[u] != 0.0) {
            phi[u] -= total.value();
            return;
        }
    }
}

}  // namespace

std::vector<double> contrarian_speeds(std::span<const double> prices, std::uint64_t horizon,
                                     double alpha) {
    if (horizon < 6) throw std::invalid_argument("contrarian_speeds: horizon must be >= 6");
    if (!(alpha > 1.0)) throw std::invalid_argument("contrarian_speeds: alpha must exceed 1");
    if (prices.size() < horizon + 1) {
        throw std::invalid_argument("contrarian_speeds: prices must cover S_0..S_T");
    }

    const std::uint64_t active_end = 3 * (horizon / 6);  // inclusive
    const std::uint64_t liq_end = 6 * (horizon / 6);     // inclusive
    const double exponent = 1.0 / (alpha - 1.0);

    std::vector<double> phi(horizon + 1, 0.0);
    KahanSum active_sum;
    for (std::uint64_t t = 0; t <= active_end; ++t) {
        const double s = prices[t];
        phi[t] = -sign(s) * std::pow(std::abs(s), exponent);
        active_sum.add(phi[t]);
    }
    const double unwind = -active_sum.value() / static_cast<double>(active_end);
    for (std::uint64_t t = active_end + 1; t <= liq_end; ++t) phi[t] = unwind;

    zero_total(phi);
    return phi;
}

std::vector<double> baseline_speeds(StrategyKind kind, std::uint64_t horizon,
                                    std::uint64_t seed) {
    if (horizon < 2) throw std::invalid_argument("baseline_speeds: horizon must be >= 2");
    std::vector<double> phi(horizon + 1, 0.0);
    switch (kind) {
        case StrategyKind::Zero:
            break;
        case StrategyKind::HoldAndLiquidate: {
            phi[0] = 1.0;
            const double speed = -1.0 / static_cast<double>(horizon);
            for (std::uint64_t t = 1; t <= horizon; ++t) phi[t] = speed;
            zero_total(phi);
            break;
        }
        case StrategyKind::RandomLiquidating: {
            Xoshiro256pp rng(derive_stream_seed(seed, 0x72616e64ULL));
            KahanSum total;
            for (std::uint64_t t = 0; t < horizon; ++t) {
                phi[t] = 2.0 * rng.uniform01() - 1.0;
                total.add(phi[t]);
            }
            phi[horizon] = -total.value();
            zero_total(phi);
            break;
        }
        case StrategyKind::Contrarian:
            throw std::invalid_argument("baseline_speeds: contrarian needs prices");
    }
    return phi;
}

std::vector<double> trade_speeds(const Strategy& strategy, std::span<const double> prices,
                                 std::uint64_t horizon, std::uint64_t stream) {
    switch (strategy.kind) {
        case StrategyKind::Contrarian:
            return contrarian_speeds(prices, horizon, strategy.alpha);
        case StrategyKind::RandomLiquidating:
            return baseline_speeds(strategy.kind, horizon,
                                   derive_stream_seed(strategy.seed, stream));
        default:
            return baseline_speeds(strategy.kind, horizon, strategy.seed);
    }
}

}  // namespace negmem
