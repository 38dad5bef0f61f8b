#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace negmem {

enum class StrategyKind { Contrarian, Zero, HoldAndLiquidate, RandomLiquidating };

const char* strategy_name(StrategyKind k);
StrategyKind strategy_from_name(const std::string& name);

struct Strategy {
    StrategyKind kind = StrategyKind::Contrarian;
    double alpha = 2.0;       // impact exponent, Contrarian only
    std::uint64_t seed = 0;   // RandomLiquidating only
};

// The contrarian rule with a constant-speed unwind:
//   phi_t = -sgn(S_t) |S_t|^{1/(alpha-1)}              for 0 <= t <= 3*floor(T/6)
//   phi_t = -(1/(3*floor(T/6))) sum_{s<=3*floor(T/6)} phi_s
//                                                      for 3*floor(T/6) < t <= 6*floor(T/6)
//   phi_t = 0                                          otherwise.
// Adapted (phi_t needs S_0..S_t only) and liquidating: the float residual of
// the constant-speed phase is folded into the last nonzero trade so the
// speeds sum to exactly zero.
std::vector<double> contrarian_speeds(std::span<const double> prices, std::uint64_t horizon,
                                     double alpha);

// Controls for the growth experiment. Zero never trades. HoldAndLiquidate
// buys one share and unwinds evenly. RandomLiquidating draws i.i.d. speeds
// on [-1, 1] and closes the position with the final trade.
std::vector<double> baseline_speeds(StrategyKind kind, std::uint64_t horizon,
                                    std::uint64_t seed);

// Dispatch on the configured kind; `stream` offsets the random baseline's
// seed so each Monte Carlo path gets its own draw.
std::vector<double> trade_speeds(const Strategy& strategy, std::span<const double> prices,
                                 std::uint64_t horizon, std::uint64_t stream = 0);

}  // namespace negmem
