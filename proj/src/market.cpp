#include "negmem/market.hpp"

#include <cmath>
#include <sstream>

#include "negmem/util.hpp"

namespace negmem {

double gstar(double y, const MarketParams& params) {
    params.validate();
    if (y == 0.0) return 0.0;
    const double a = params.alpha;
    const double c = (a - 1.0) / a * std::pow(a, 1.0 / (1.0 - a)) *
                     std::pow(params.lambda, 1.0 / (1.0 - a));
    return c * std::pow(std::abs(y), a / (a - 1.0));
}

LedgerReport settle(std::span<const double> prices, std::span<const double> phi,
                    const MarketParams& params) {
    params.validate();
    if (phi.empty()) throw std::invalid_argument("settle: empty strategy");
    if (prices.size() < phi.size()) {
        throw std::invalid_argument("settle: prices must cover S_0..S_T");
    }
    const std::size_t n = phi.size();  // T + 1 trades

    KahanSum total, abs_total;
    for (double p : phi) {
        total.add(p);
        abs_total.add(std::abs(p));
    }
    const double tolerance = 1e-9 * std::max(1.0, abs_total.value());
    if (std::abs(total.value()) > tolerance) {
        std::ostringstream msg;
        msg << "strategy does not liquidate: Phi_{T+1} = " << total.value()
            << " exceeds tolerance " << tolerance;
        throw LiquidationViolation(msg.str(), total.value());
    }

    LedgerReport report;
    report.phi.assign(phi.begin(), phi.end());
    report.shares.resize(n + 1);
    KahanSum shares, gross, friction, bound;
    report.shares[0] = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        gross.add(-phi[u] * prices[u]);
        friction.add(params.lambda * std::pow(std::abs(phi[u]), params.alpha));
        bound.add(gstar(-prices[u], params));
        shares.add(phi[u]);
        report.shares[u + 1] = shares.value();
    }
    report.gross_pnl = gross.value();
    report.friction = friction.value();
    report.terminal_cash = report.gross_pnl - report.friction;
    report.gstar_bound = bound.value();
    return report;
}

FrictionlessCheck frictionless_check(std::span<const double> prices,
                                     std::span<const double> phi) {
    if (phi.empty()) throw std::invalid_argument("frictionless_check: empty strategy");
    if (prices.size() < phi.size() + 1) {
        throw std::invalid_argument("frictionless_check: prices must cover S_0..S_{T+1}");
    }
    const std::size_t n = phi.size();

    FrictionlessCheck out;
    KahanSum shares, wealth, traded, total;
    for (std::size_t u = 0; u < n; ++u) {
        shares.add(phi[u]);                                  // Phi_{u+1}
        wealth.add(shares.value() * (prices[u + 1] - prices[u]));
        traded.add(-phi[u] * prices[u]);
        total.add(phi[u]);
    }
    out.wealth_form = wealth.value();
    out.trade_form = traded.value() + prices[n] * total.value();
    return out;
}

}  // namespace negmem
