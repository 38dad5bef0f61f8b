#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "negmem/covariance.hpp"

namespace negmem {

// Exact second-order state of the price process S_t = Z_1 + ... + Z_t:
//   var(S_t)            = t*r(0) + 2*sum_{k=1}^{t-1} (t-k) r(k)
//   cov(S_s - S_t, S_t) = sum_{i=t+1}^{s} sum_{j=1}^{t} r(i-j)
// collapsed to O(1) range queries through nested prefix sums of r.
// Everything here is computed from r(.) deterministically; sampled paths
// never feed back into these numbers.
class SecondOrderTable {
public:
    SecondOrderTable(const CovarianceModel& model, std::uint64_t horizon);

    std::uint64_t horizon() const { return horizon_; }
    const CovarianceModel& model() const { return model_; }

    double var_s(std::uint64_t t) const;
    double cov_increment_past(std::uint64_t s, std::uint64_t t) const;

    // rho(s, t) = cov(S_s, S_t) / var(S_t) for s >= t >= 1.
    double rho(std::uint64_t s, std::uint64_t t) const;

private:
    CovarianceModel model_;
    std::uint64_t horizon_;
    double r0_;
    std::vector<double> pp1_;  // pp1_[m] = sum_{u=0}^{m} sum_{k=1}^{u} r(k)
    std::vector<double> var_;
};

// One-shot wrappers matching the table queries.
double var_s(const CovarianceModel& model, std::uint64_t t);
double cov_increment_past(const CovarianceModel& model, std::uint64_t s, std::uint64_t t);
double rho(const CovarianceModel& model, std::uint64_t s, std::uint64_t t);

// E|N(0,1)|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi), p > 0.
double abs_moment_constant(double p);

// Gamma via a Lanczos approximation (double precision, ~13 digits).
double lanczos_gamma(double x);

// Q(T) = sum_{t=0}^{T} E|S_t|^{alpha/(alpha-1)}
//      = C_{alpha/(alpha-1)} sum_{t=0}^{T} var(S_t)^{alpha/(2(alpha-1))}.
double q_of_t(const CovarianceModel& model, std::uint64_t horizon, double alpha);
double q_of_t(const SecondOrderTable& table, std::uint64_t horizon, double alpha);

// Expected profit decomposition of the contrarian strategy on horizon T
// (multiple of 6, active phase [0, T/2], liquidation (T/2, T]):
//   EI1 = Q(T/2)                        gross gain of the active phase
//   EI2 = lambda * EI1                  active-phase friction
//   EI3 = (1/(T/2)) sum_s sum_t rho(s,t) E|S_t|^{alpha/(alpha-1)}
//   |EI4| <= EI2                        liquidation friction (Jensen)
// and the analytic lower bound L(T) = (1 - 2*lambda)*EI1 - EI3.
struct ProfitTerms {
    double ei1 = 0.0;
    double ei2 = 0.0;
    double ei3 = 0.0;
    double ei4_bound = 0.0;
    double lower_bound = 0.0;
};

ProfitTerms analytic_profit_terms(const CovarianceModel& model, std::uint64_t horizon,
                                  double alpha, double lambda);
ProfitTerms analytic_profit_terms(const SecondOrderTable& table, std::uint64_t horizon,
                                  double alpha, double lambda);

// Concrete witnesses for the variance sandwich, the covariance bounds, and
// the rho bounds, found by grid search and recorded with their grid. The
// grid extrema certify the statements on [1, horizon] only; beyond it the
// certificate extrapolates from the d1 bound and says so in `note`.
struct BoundsCertificate {
    double hurst = 0.0;  // chi/2 + 1

    // b1 * t^{2H} <= var(S_t) <= b2 * t^{2H} for t in [t1, horizon].
    double b1 = 0.0;
    double b2 = 0.0;
    std::uint64_t t1 = 0;
    std::uint64_t t2 = 0;

    // cov(S_s - S_t, S_t) <= d1 for s > t > t3;
    // cov <= 0 whenever s - t > k and t > t4.
    double d1 = 0.0;
    std::uint64_t t3 = 0;
    double k = 0.0;
    std::uint64_t t4 = 0;

    // rho(s,t) < 1 + r for all grid pairs; rho <= 1 - epsilon on the region
    // t_bar < t < T/2 < eta*T < s with eta = 2/3 fixed.
    double r = 0.0;
    double rho_max = 0.0;
    double eta = 2.0 / 3.0;
    double epsilon = 0.0;
    std::uint64_t t_bar = 0;

    double u_four_thirds = 0.0;  // informational
    std::uint64_t horizon = 0;
    std::uint64_t variance_window_lo = 0;
    std::string note;
};

class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Grid search over t in [1, horizon], s in (t, horizon] (geometric in s).
// Throws CertificationError if any certified statement fails on the grid,
// which signals either a model outside the assumptions or a bug.
BoundsCertificate certify_bounds(const CovarianceModel& model, std::uint64_t horizon);

}  // namespace negmem
