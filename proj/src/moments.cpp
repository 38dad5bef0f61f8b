#include "negmem/moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "negmem/util.hpp"

namespace negmem {

SecondOrderTable::SecondOrderTable(const CovarianceModel& model, std::uint64_t horizon)
    : model_(model), horizon_(horizon), r0_(model.at(0)) {
    pp1_.resize(horizon ? horizon : 1);
    var_.resize(horizon + 1);

    KahanSum p1;   // sum_{k<=u} r(k)
    KahanSum pp1;  // sum over u of p1
    KahanSum var;  // var(S_t) = sum_{u<t} (r0 + 2*p1(u))
    var_[0] = 0.0;
    for (std::uint64_t u = 0; u < horizon; ++u) {
        if (u >= 1) p1.add(model.at(static_cast<std::int64_t>(u)));
        pp1.add(p1.value());
        pp1_[u] = pp1.value();
        var.add(r0_ + 2.0 * p1.value());
        var_[u + 1] = var.value();
    }
}

double SecondOrderTable::var_s(std::uint64_t t) const {
    if (t > horizon_) throw std::out_of_range("var_s: t beyond table horizon");
    return var_[t];
}

double SecondOrderTable::cov_increment_past(std::uint64_t s, std::uint64_t t) const {
    if (!(s > t && t >= 1)) {
        throw std::invalid_argument("cov_increment_past: need s > t >= 1");
    }
    if (s > horizon_) throw std::out_of_range("cov_increment_past: s beyond table horizon");
    // sum_{i=t+1}^{s} sum_{j=1}^{t} r(i-j) = PP1(s-1) - PP1(t-1) - PP1(s-t-1)
    return pp1_[s - 1] - pp1_[t - 1] - pp1_[s - t - 1];
}

double SecondOrderTable::rho(std::uint64_t s, std::uint64_t t) const {
    if (t < 1) throw std::invalid_argument("rho: t must be >= 1");
    if (s < t) throw std::invalid_argument("rho: need s >= t");
    if (s == t) return 1.0;
    const double v = var_s(t);
    if (!(v >= 1e-14 * r0_)) {
        throw std::domain_error("rho: var(S_t) vanishes, ratio undefined");
    }
    return cov_increment_past(s, t) / v + 1.0;
}

double var_s(const CovarianceModel& model, std::uint64_t t) {
    return SecondOrderTable(model, t).var_s(t);
}

double cov_increment_past(const CovarianceModel& model, std::uint64_t s, std::uint64_t t) {
    return SecondOrderTable(model, s).cov_increment_past(s, t);
}

double rho(const CovarianceModel& model, std::uint64_t s, std::uint64_t t) {
    return SecondOrderTable(model, std::max(s, t)).rho(s, t);
}

double lanczos_gamma(double x) {
    // g = 7, n = 9 coefficient set.
    static const double coeff[9] = {
        0.99999999999980993,  676.5203681218851,    -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,  12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // Reflection for the left half plane.
        return 3.14159265358979323846 /
               (std::sin(3.14159265358979323846 * x) * lanczos_gamma(1.0 - x));
    }
    x -= 1.0;
    double acc = coeff[0];
    for (int i = 1; i < 9; ++i) acc += coeff[i] / (x + static_cast<double>(i));
    const double t = x + 7.5;
    return std::sqrt(2.0 * 3.14159265358979323846) * std::pow(t, x + 0.5) *
           std::exp(-t) * acc;
}

double abs_moment_constant(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("abs_moment_constant: p must be positive");
    return std::pow(2.0, 0.5 * p) * lanczos_gamma(0.5 * (p + 1.0)) /
           std::sqrt(3.14159265358979323846);
}

double q_of_t(const SecondOrderTable& table, std::uint64_t horizon, double alpha) {
    if (!(alpha > 1.0)) throw std::invalid_argument("q_of_t: alpha must exceed 1");
    if (horizon > table.horizon()) throw std::out_of_range("q_of_t: horizon beyond table");
    const double p = alpha / (alpha - 1.0);
    const double cp = abs_moment_constant(p);
    KahanSum acc;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        acc.add(std::pow(table.var_s(t), 0.5 * p));
    }
    return cp * acc.value();
}

double q_of_t(const CovarianceModel& model, std::uint64_t horizon, double alpha) {
    return q_of_t(SecondOrderTable(model, horizon), horizon, alpha);
}

ProfitTerms analytic_profit_terms(const SecondOrderTable& table, std::uint64_t horizon,
                                  double alpha, double lambda) {
    if (horizon < 6 || horizon % 6 != 0) {
        throw std::invalid_argument("analytic_profit_terms: horizon must be a positive multiple of 6");
    }
    if (!(alpha > 1.0)) throw std::invalid_argument("analytic_profit_terms: alpha must exceed 1");
    if (!(lambda >= 0.0)) throw std::invalid_argument("analytic_profit_terms: lambda must be >= 0");
    if (horizon > table.horizon()) {
        throw std::out_of_range("analytic_profit_terms: horizon beyond table");
    }

    const std::uint64_t m = horizon / 2;
    const double p = alpha / (alpha - 1.0);
    const double cp = abs_moment_constant(p);

    // w_t = E|S_t|^p; t = 0 contributes nothing since S_0 = 0.
    std::vector<double> weight(m + 1, 0.0);
    KahanSum ei1;
    for (std::uint64_t t = 1; t <= m; ++t) {
        weight[t] = cp * std::pow(table.var_s(t), 0.5 * p);
        ei1.add(weight[t]);
    }

    KahanSum ei3;
    for (std::uint64_t s = m + 1; s <= horizon; ++s) {
        KahanSum inner;
        for (std::uint64_t t = 1; t <= m; ++t) {
            inner.add(table.rho(s, t) * weight[t]);
        }
        ei3.add(inner.value());
    }

    ProfitTerms out;
    out.ei1 = ei1.value();
    out.ei2 = lambda * out.ei1;
    out.ei3 = ei3.value() / static_cast<double>(m);
    out.ei4_bound = lambda * out.ei1;
    out.lower_bound = (1.0 - 2.0 * lambda) * out.ei1 - out.ei3;
    return out;
}

ProfitTerms analytic_profit_terms(const CovarianceModel& model, std::uint64_t horizon,
                                  double alpha, double lambda) {
    return analytic_profit_terms(SecondOrderTable(model, horizon), horizon, alpha, lambda);
}

namespace {

// s-grid for a fixed t: dense straight after t, then ~5% geometric steps.
std::vector<std::uint64_t> s_grid(std::uint64_t t, std::uint64_t horizon) {
    std::vector<std::uint64_t> out;
    std::uint64_t s = t + 1;
    const std::uint64_t dense_until = std::min(horizon, t + 64);
    while (s <= dense_until) out.push_back(s++);
    while (s <= horizon) {
        out.push_back(s);
        s = std::max(s + 1, static_cast<std::uint64_t>(
                                std::ceil(static_cast<double>(s) * 1.05)));
    }
    if (!out.empty() && out.back() != horizon) out.push_back(horizon);
    return out;
}

double fit_hurst(const CovarianceModel& model, std::uint64_t horizon) {
    if (model.kind() == CovarianceKind::Fgn) return model.hurst();
    if (model.tail() && std::isfinite(model.tail()->chi)) {
        return model.tail()->chi / 2.0 + 1.0;
    }
    const auto report =
        verify_assumption(model, 1, std::min<std::uint64_t>(horizon, model.max_lag()));
    if (!report.pass) {
        throw CertificationError(
            "certify_bounds: model fails the negative-memory conditions: " +
            report.diagnostic);
    }
    return report.chi_fit / 2.0 + 1.0;
}

}  // namespace

BoundsCertificate certify_bounds(const CovarianceModel& model, std::uint64_t horizon) {
    if (horizon < 1000) {
        throw std::invalid_argument("certify_bounds: horizon must be at least 10^3");
    }

    BoundsCertificate cert;
    cert.horizon = horizon;
    cert.hurst = fit_hurst(model, horizon);
    const double two_h = 2.0 * cert.hurst;

    SecondOrderTable table(model, horizon);

    // Variance sandwich over a tail window.
    cert.variance_window_lo = std::max<std::uint64_t>(2, horizon / 100);
    cert.t1 = cert.t2 = cert.variance_window_lo;
    double b1 = std::numeric_limits<double>::infinity();
    double b2 = -std::numeric_limits<double>::infinity();
    for (std::uint64_t t = cert.variance_window_lo; t <= horizon; ++t) {
        const double v = table.var_s(t);
        if (!(v > 0.0)) {
            std::ostringstream msg;
            msg << "variance lower bound violated: var(S_" << t << ") = " << v;
            throw CertificationError(msg.str());
        }
        const double ratio = v / std::pow(static_cast<double>(t), two_h);
        b1 = std::min(b1, ratio);
        b2 = std::max(b2, ratio);
    }
    cert.b1 = b1;
    cert.b2 = b2;

    // Covariance extrema and positive-covariance pairs over the (t, s) grid.
    double d1 = -std::numeric_limits<double>::infinity();
    double rho_max = -std::numeric_limits<double>::infinity();
    std::uint64_t worst_gap = 0;   // largest s - t with cov > 0
    std::uint64_t worst_t = 0;     // largest t participating in cov > 0
    for (std::uint64_t t = 1; t < horizon; ++t) {
        for (std::uint64_t s : s_grid(t, horizon)) {
            const double cov = table.cov_increment_past(s, t);
            d1 = std::max(d1, cov);
            rho_max = std::max(rho_max, cov / table.var_s(t) + 1.0);
            if (cov > 0.0) {
                worst_gap = std::max(worst_gap, s - t);
                worst_t = std::max(worst_t, t);
            }
        }
    }
    cert.d1 = d1;
    cert.t3 = 1;
    cert.rho_max = rho_max;
    // Any r with rho < 1 + r on the grid is a witness; keep it positive even
    // when every grid rho sits below 1 (the FGN case).
    cert.r = std::max(rho_max - 1.0, 0.0) + 1e-9;

    // Smallest gap K (with onset t4) from which the covariance stays <= 0.
    if (worst_gap == 0) {
        cert.k = 1.0;
        cert.t4 = 1;
    } else {
        cert.k = static_cast<double>(worst_gap);
        cert.t4 = worst_t + 1;
        if (static_cast<double>(cert.t4) > 0.25 * static_cast<double>(horizon) ||
            cert.k > 0.25 * static_cast<double>(horizon)) {
            std::ostringstream msg;
            msg << "covariance negativity fails to set in: positive pairs up to gap "
                << worst_gap << " and t = " << worst_t;
            throw CertificationError(msg.str());
        }
        // Re-scan: above the onset, gaps beyond K must all be non-positive.
        for (std::uint64_t t = cert.t4 + 1; t < horizon; ++t) {
            for (std::uint64_t s : s_grid(t, horizon)) {
                if (static_cast<double>(s - t) > cert.k &&
                    table.cov_increment_past(s, t) > 0.0) {
                    std::ostringstream msg;
                    msg << "cov(S_s - S_t, S_t) > 0 at s = " << s << ", t = " << t
                        << " despite gap > K";
                    throw CertificationError(msg.str());
                }
            }
        }
    }

    // rho <= 1 - epsilon on t_bar < t < T/2 < eta*T < s, with eta = 2/3.
    cert.t_bar = std::max<std::uint64_t>(
        {static_cast<std::uint64_t>(std::ceil(3.0 * cert.k)), cert.t4, 2});
    const std::uint64_t t_hi = horizon / 2;   // exclusive
    const std::uint64_t s_lo = static_cast<std::uint64_t>(
        std::floor(cert.eta * static_cast<double>(horizon))) + 1;
    if (cert.t_bar + 1 >= t_hi) {
        throw CertificationError("certify_bounds: horizon too small for the rho region");
    }
    double region_rho_max = -std::numeric_limits<double>::infinity();
    for (std::uint64_t t = cert.t_bar + 1; t < t_hi; ++t) {
        for (std::uint64_t s : s_grid(t, horizon)) {
            if (s < s_lo) continue;
            region_rho_max = std::max(region_rho_max, table.rho(s, t));
        }
        // The grid may skip s_lo itself; pin the corner explicitly.
        region_rho_max = std::max(region_rho_max, table.rho(s_lo, t));
    }
    cert.epsilon = 1.0 - region_rho_max;
    if (!(cert.epsilon > 0.0)) {
        std::ostringstream msg;
        msg << "rho reaches " << region_rho_max
            << " on the separated region; no positive epsilon exists";
        throw CertificationError(msg.str());
    }

    // Informational U(4/3) from a quick tail fit of J2.
    {
        const double chi = two_h - 2.0;
        double j2 = -std::numeric_limits<double>::infinity();
        for (std::uint64_t t = 16; t <= horizon;
             t = std::max(t + 1, static_cast<std::uint64_t>(std::ceil(1.1 * static_cast<double>(t))))) {
            j2 = std::max(j2, model.at(static_cast<std::int64_t>(t)) /
                                  std::pow(static_cast<double>(t), chi));
        }
        const double v = 4.0 / 3.0;
        cert.u_four_thirds = j2 / (two_h * (two_h - 1.0)) *
                             (1.0 - (std::pow(v, two_h) - std::pow(v - 1.0, two_h)));
    }

    std::ostringstream note;
    note << "grid: t in [1," << horizon << "], s geometric to " << horizon
         << "; statements certified on the grid only, rho beyond it extrapolated "
            "from the d1 bound";
    cert.note = note.str();
    return cert;
}

}  // namespace negmem
