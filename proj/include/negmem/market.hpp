#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace negmem {

// Temporary superlinear impact: trading at speed phi costs lambda*|phi|^alpha
// per step on top of the cash swap.
struct MarketParams {
    double alpha = 2.0;
    double lambda = 0.01;

    void validate() const {
        if (!(alpha > 1.0)) throw std::invalid_argument("market: alpha must exceed 1");
        if (!(lambda > 0.0)) throw std::invalid_argument("market: lambda must be positive");
    }
};

struct LedgerReport {
    std::vector<double> phi;     // trade speeds, indices 0..T
    std::vector<double> shares;  // Phi_t = sum_{u<t} phi_u, indices 0..T+1
    double gross_pnl = 0.0;      // -sum phi_u S_u
    double friction = 0.0;       // sum lambda |phi_u|^alpha
    double terminal_cash = 0.0;  // gross_pnl - friction
    double gstar_bound = 0.0;    // sum_t G*(-S_t), the pathwise profit ceiling
};

class LiquidationViolation : public std::runtime_error {
public:
    LiquidationViolation(const std::string& what, double residual_)
        : std::runtime_error(what), residual(residual_) {}
    double residual;  // Phi_{T+1} left over
};

// Fenchel-Legendre conjugate of x -> lambda |x|^alpha:
// G*(y) = sup_x (x y - lambda |x|^alpha)
//       = (alpha-1)/alpha * alpha^{1/(1-alpha)} * lambda^{1/(1-alpha)} * |y|^{alpha/(alpha-1)}.
double gstar(double y, const MarketParams& params);

// Settles a liquidating strategy against a price path. `prices` must cover
// S_0..S_T (extra entries are ignored); `phi` holds speeds for u = 0..T.
// Throws LiquidationViolation unless |sum phi| <= 1e-9 * max(1, sum |phi|).
LedgerReport settle(std::span<const double> prices, std::span<const double> phi,
                    const MarketParams& params);

// Frictionless cash at T+1 in its two algebraically equal forms; needs
// prices through S_{T+1}.
struct FrictionlessCheck {
    double wealth_form = 0.0;  // sum_{u=1}^{T+1} Phi_u (S_u - S_{u-1})
    double trade_form = 0.0;   // -sum_u phi_u S_u + S_{T+1} sum_u phi_u
};

FrictionlessCheck frictionless_check(std::span<const double> prices,
                                     std::span<const double> phi);

}  // namespace negmem
