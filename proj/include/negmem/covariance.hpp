#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace negmem {

enum class CovarianceKind { Fgn, Explicit };

// Power-law tail metadata for a negative-memory covariance sequence:
// j1 * t^chi <= r(t) <= j2 * t^chi for t >= t0, with j1 <= j2 < 0 and
// chi in (-2, -1).
struct TailEstimate {
    double chi = std::numeric_limits<double>::quiet_NaN();
    double j1 = std::numeric_limits<double>::quiet_NaN();
    double j2 = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t t0 = 0;
};

// A stationary covariance sequence r(t) for the increment process.
// Immutable after construction; safe to share across threads.
class CovarianceModel {
public:
    static CovarianceModel fgn(double hurst, double variance_scale = 1.0);

    // `compactly_supported` means r(t) = 0 beyond the given lags; without it,
    // evaluating past the sequence is an error rather than a silent zero.
    static CovarianceModel explicit_sequence(std::vector<double> values,
                                             bool compactly_supported);

    CovarianceKind kind() const { return kind_; }
    double hurst() const { return hurst_; }
    double variance_scale() const { return scale_; }
    bool compactly_supported() const { return compact_; }
    const std::vector<double>& explicit_values() const { return values_; }

    // r(|lag|); stationarity makes the sequence even in the lag.
    double at(std::int64_t lag) const;

    // Largest lag this model can evaluate (UINT64_MAX when unbounded).
    std::uint64_t max_lag() const;

    // Known tail exponent: exact 2H-2 for FGN, fitted value for explicit
    // models once attached, NaN otherwise.
    double chi() const;

    const std::optional<TailEstimate>& tail() const { return tail_; }

    // Value-returning attach; keeps constructed models immutable.
    CovarianceModel with_tail(const TailEstimate& tail) const;

private:
    CovarianceModel() = default;

    CovarianceKind kind_ = CovarianceKind::Fgn;
    double hurst_ = 0.0;
    double scale_ = 1.0;
    bool compact_ = false;
    std::vector<double> values_;
    std::optional<TailEstimate> tail_;
};

// FGN covariance r(lag) = scale/2 * (|lag+1|^{2H} - 2|lag|^{2H} + |lag-1|^{2H})
// for H in (0, 1/2). Evaluated by a same-sign series for lag >= 2 so that the
// second difference keeps full precision at large lags.
double fgn_covariance(double hurst, double variance_scale, std::uint64_t lag);

// r(0) + 2 * sum_{t=1}^{n} r(t); tends to 0 for negative-memory models.
double partial_sum(const CovarianceModel& model, std::uint64_t n);

struct AssumptionReport {
    double chi_fit = std::numeric_limits<double>::quiet_NaN();
    double j1 = std::numeric_limits<double>::quiet_NaN();
    double j2 = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t t0 = 0;
    bool pass = false;
    std::uint64_t window_lo = 0;
    std::uint64_t window_hi = 0;

    bool tail_negative = false;
    bool chi_in_range = false;
    bool partial_sum_decays = false;
    std::string diagnostic;

    TailEstimate tail() const { return TailEstimate{chi_fit, j1, j2, t0}; }
};

// Numerical certification of the negative-memory conditions over a finite
// lag window: strictly negative tail, power-law sandwich with fitted
// constants, and decay of the symmetric partial sums.
// Requires window_hi >= 100 * window_lo (two decades).
AssumptionReport verify_assumption(const CovarianceModel& model,
                                   std::uint64_t window_lo,
                                   std::uint64_t window_hi);

}  // namespace negmem
