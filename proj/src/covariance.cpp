#include "negmem/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "negmem/util.hpp"

namespace negmem {

CovarianceModel CovarianceModel::fgn(double hurst, double variance_scale) {
    if (!(hurst > 0.0) || !(hurst < 0.5)) {
        throw std::invalid_argument("fgn: hurst must lie in (0, 1/2)");
    }
    if (!(variance_scale > 0.0)) {
        throw std::invalid_argument("fgn: variance_scale must be positive");
    }
    CovarianceModel m;
    m.kind_ = CovarianceKind::Fgn;
    m.hurst_ = hurst;
    m.scale_ = variance_scale;
    return m;
}

CovarianceModel CovarianceModel::explicit_sequence(std::vector<double> values,
                                                   bool compactly_supported) {
    if (values.empty()) {
        throw std::invalid_argument("explicit_sequence: no lags given");
    }
    if (!(values[0] > 0.0)) {
        throw std::invalid_argument("explicit_sequence: r(0) must be positive");
    }
    CovarianceModel m;
    m.kind_ = CovarianceKind::Explicit;
    m.scale_ = values[0];
    m.compact_ = compactly_supported;
    m.values_ = std::move(values);
    return m;
}

double CovarianceModel::at(std::int64_t lag) const {
    const std::uint64_t k = static_cast<std::uint64_t>(lag < 0 ? -lag : lag);
    if (kind_ == CovarianceKind::Fgn) {
        return fgn_covariance(hurst_, scale_, k);
    }
    if (k < values_.size()) return values_[k];
    if (compact_) return 0.0;
    std::ostringstream msg;
    msg << "covariance lag " << k << " beyond the " << values_.size()
        << " given values (sequence not marked compactly supported)";
    throw std::out_of_range(msg.str());
}

std::uint64_t CovarianceModel::max_lag() const {
    if (kind_ == CovarianceKind::Fgn || compact_) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return values_.size() - 1;
}

double CovarianceModel::chi() const {
    if (kind_ == CovarianceKind::Fgn) return 2.0 * hurst_ - 2.0;
    if (tail_) return tail_->chi;
    return std::numeric_limits<double>::quiet_NaN();
}

CovarianceModel CovarianceModel::with_tail(const TailEstimate& tail) const {
    CovarianceModel m = *this;
    m.tail_ = tail;
    return m;
}

double fgn_covariance(double hurst, double variance_scale, std::uint64_t lag) {
    if (!(hurst > 0.0) || !(hurst < 0.5)) {
        throw std::invalid_argument("fgn_covariance: hurst must lie in (0, 1/2)");
    }
    if (!(variance_scale > 0.0)) {
        throw std::invalid_argument("fgn_covariance: variance_scale must be positive");
    }
    const double a = 2.0 * hurst;
    if (lag == 0) return variance_scale;
    if (lag == 1) return variance_scale * 0.5 * (std::pow(2.0, a) - 2.0);

    // r(k) = scale/2 * k^{2H} * [(1+x)^{2H} + (1-x)^{2H} - 2] with x = 1/k.
    // For 0 < 2H < 1 every even binomial coefficient C(2H, 2m) is negative,
    // so the bracket accumulates without cancellation:
    //   (1+x)^a + (1-x)^a - 2 = 2 * sum_{m>=1} C(a, 2m) x^{2m}.
    // The direct second difference of k^{2H} loses most of its digits by
    // k ~ 10^3, which is fatal for the var(S_t) exactness tolerance.
    const double x2 = 1.0 / (static_cast<double>(lag) * static_cast<double>(lag));
    double coeff = a * (a - 1.0) * 0.5;  // C(a, 2)
    double xpow = x2;
    double bracket = coeff * xpow;
    for (int m = 2; m <= 64; ++m) {
        coeff *= (a - (2.0 * m - 2.0)) * (a - (2.0 * m - 1.0)) /
                 ((2.0 * m - 1.0) * (2.0 * m));
        xpow *= x2;
        const double term = coeff * xpow;
        bracket += term;
        if (std::abs(term) <= std::abs(bracket) * 1e-17) break;
    }
    return variance_scale * std::pow(static_cast<double>(lag), a) * bracket;
}

double partial_sum(const CovarianceModel& model, std::uint64_t n) {
    KahanSum acc;
    acc.add(model.at(0));
    for (std::uint64_t t = 1; t <= n; ++t) acc.add(2.0 * model.at(static_cast<std::int64_t>(t)));
    return acc.value();
}

namespace {

// Geometric lag grid over [lo, hi], every integer up to `dense`, then ~5%
// steps. Uniform spacing would drown the fit in large-lag points.
std::vector<std::uint64_t> geometric_lags(std::uint64_t lo, std::uint64_t hi,
                                          std::uint64_t dense = 64) {
    std::vector<std::uint64_t> lags;
    std::uint64_t t = lo;
    while (t <= hi) {
        lags.push_back(t);
        if (t < dense) {
            ++t;
        } else {
            const std::uint64_t next = static_cast<std::uint64_t>(
                std::ceil(static_cast<double>(t) * 1.05));
            t = std::max(next, t + 1);
        }
    }
    if (lags.back() != hi) lags.push_back(hi);
    return lags;
}

struct OlsFit {
    double slope;
    double intercept;
};

OlsFit ols(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

}  // namespace

AssumptionReport verify_assumption(const CovarianceModel& model,
                                   std::uint64_t window_lo,
                                   std::uint64_t window_hi) {
    if (window_lo < 1 || window_hi < 100 * window_lo) {
        throw std::invalid_argument(
            "verify_assumption: lag window must span at least two decades");
    }
    if (window_hi > model.max_lag()) {
        throw std::invalid_argument(
            "verify_assumption: window exceeds the model's evaluable lags");
    }

    AssumptionReport report;
    report.window_lo = window_lo;
    report.window_hi = window_hi;

    const auto lags = geometric_lags(window_lo, window_hi);
    std::vector<double> r(lags.size());
    for (std::size_t i = 0; i < lags.size(); ++i) {
        r[i] = model.at(static_cast<std::int64_t>(lags[i]));
    }

    // Smallest grid onset from which the tail stays strictly negative.
    std::size_t onset = lags.size();
    for (std::size_t i = lags.size(); i-- > 0;) {
        if (r[i] < 0.0) {
            onset = i;
        } else {
            break;
        }
    }
    report.tail_negative = onset < lags.size();
    if (!report.tail_negative) {
        report.diagnostic = "tail is not strictly negative on the window";
        return report;
    }
    report.t0 = lags[onset];

    std::vector<double> log_t, log_r;
    for (std::size_t i = onset; i < lags.size(); ++i) {
        log_t.push_back(std::log(static_cast<double>(lags[i])));
        log_r.push_back(std::log(-r[i]));
    }
    if (log_t.size() < 8) {
        report.diagnostic = "too few negative tail lags to fit an exponent";
        return report;
    }
    report.chi_fit = ols(log_t, log_r).slope;
    report.chi_in_range = report.chi_fit > -2.0 && report.chi_fit < -1.0;

    // Tightest sandwich J1 t^chi <= r(t) <= J2 t^chi over [t0, hi].
    double j1 = 0.0, j2 = -std::numeric_limits<double>::infinity();
    for (std::size_t i = onset; i < lags.size(); ++i) {
        const double ratio = r[i] / std::pow(static_cast<double>(lags[i]), report.chi_fit);
        j1 = std::min(j1, ratio);
        j2 = std::max(j2, ratio);
    }
    report.j1 = j1;
    report.j2 = j2;

    // Partial sums must vanish at the analytic tail rate:
    // |r(0) + 2*sum_{t<=N} r(t)| <= 2|J1| N^{chi+1} / |chi+1|  (with slack).
    report.partial_sum_decays = true;
    if (report.chi_in_range) {
        const auto checkpoints = geometric_lags(std::max<std::uint64_t>(report.t0, 8), window_hi);
        KahanSum acc;
        acc.add(model.at(0));
        std::uint64_t t = 1;
        const double envelope_scale = 2.0 * std::abs(j1) / std::abs(report.chi_fit + 1.0);
        for (std::uint64_t n : checkpoints) {
            for (; t <= n; ++t) acc.add(2.0 * model.at(static_cast<std::int64_t>(t)));
            const double bound =
                1.5 * envelope_scale * std::pow(static_cast<double>(n), report.chi_fit + 1.0);
            if (std::abs(acc.value()) > bound) {
                report.partial_sum_decays = false;
                std::ostringstream msg;
                msg << "partial sum at N=" << n << " is " << acc.value()
                    << ", above the tail envelope " << bound;
                report.diagnostic = msg.str();
                break;
            }
        }
    } else {
        report.partial_sum_decays = false;
        std::ostringstream msg;
        msg << "fitted chi " << report.chi_fit << " outside (-2, -1)";
        report.diagnostic = msg.str();
    }

    report.pass = report.tail_negative && report.chi_in_range &&
                  report.partial_sum_decays && report.j2 < 0.0;
    return report;
}

}  // namespace negmem
