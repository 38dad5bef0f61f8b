#include "negmem/serialize.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "negmem/util.hpp"

namespace negmem {

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

CovarianceModel load_covariance_file(const std::filesystem::path& file,
                                     bool compactly_supported) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open covariance file: " + file.string());
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        double v;
        if (row >> v) values.push_back(v);
    }
    if (values.empty()) {
        throw std::runtime_error("covariance file has no values: " + file.string());
    }
    return CovarianceModel::explicit_sequence(std::move(values), compactly_supported);
}

nlohmann::ordered_json to_json(const AssumptionReport& report) {
    return nlohmann::ordered_json{
        {"chi_fit", report.chi_fit},
        {"j1", report.j1},
        {"j2", report.j2},
        {"t0", report.t0},
        {"pass", report.pass},
        {"window", {{"lo", report.window_lo}, {"hi", report.window_hi}}},
        {"tail_negative", report.tail_negative},
        {"chi_in_range", report.chi_in_range},
        {"partial_sum_decays", report.partial_sum_decays},
        {"diagnostic", report.diagnostic},
    };
}

nlohmann::ordered_json to_json(const BoundsCertificate& cert) {
    return nlohmann::ordered_json{
        {"hurst", cert.hurst},
        {"b1", cert.b1},
        {"b2", cert.b2},
        {"t1", cert.t1},
        {"t2", cert.t2},
        {"d1", cert.d1},
        {"t3", cert.t3},
        {"k", cert.k},
        {"t4", cert.t4},
        {"r", cert.r},
        {"rho_max", cert.rho_max},
        {"eta", cert.eta},
        {"epsilon", cert.epsilon},
        {"t_bar", cert.t_bar},
        {"u_four_thirds", cert.u_four_thirds},
        {"horizon", cert.horizon},
        {"variance_window_lo", cert.variance_window_lo},
        {"note", cert.note},
    };
}

nlohmann::ordered_json to_json(const ProfitTerms& terms) {
    return nlohmann::ordered_json{
        {"ei1", terms.ei1},        {"ei2", terms.ei2},
        {"ei3", terms.ei3},        {"ei4_bound", terms.ei4_bound},
        {"lower_bound", terms.lower_bound},
    };
}

nlohmann::ordered_json to_json(const SpectrumDiagnostic& diag) {
    return nlohmann::ordered_json{
        {"embedding_size", diag.embedding_size},
        {"min_eigenvalue", diag.min_eigenvalue},
        {"clipped_mass", diag.clipped_mass},
    };
}

nlohmann::ordered_json to_json(const GrowthReport& report) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& h : report.horizons) {
        rows.push_back({
            {"horizon", h.horizon},
            {"n_paths", h.n_paths},
            {"mean", h.mean},
            {"se", h.se},
            {"analytic_lower",
             std::isfinite(h.analytic_lower) ? nlohmann::ordered_json(h.analytic_lower)
                                             : nlohmann::ordered_json(nullptr)},
            {"upper_env", h.upper_env},
            {"positive_mean", h.positive_mean},
        });
    }
    return nlohmann::ordered_json{
        {"horizons", rows},
        {"fitted_slope", report.fit_valid ? nlohmann::ordered_json(report.fitted_slope)
                                          : nlohmann::ordered_json(nullptr)},
        {"slope_ci",
         report.fit_valid
             ? nlohmann::ordered_json{{"lo", report.slope_ci_lo}, {"hi", report.slope_ci_hi}}
             : nlohmann::ordered_json(nullptr)},
        {"fit_valid", report.fit_valid},
        {"nonpositive_horizons", report.nonpositive_horizons},
        {"analytic_lower_slope",
         std::isfinite(report.analytic_lower_slope)
             ? nlohmann::ordered_json(report.analytic_lower_slope)
             : nlohmann::ordered_json(nullptr)},
        {"upper_env_slope", std::isfinite(report.upper_env_slope)
                                ? nlohmann::ordered_json(report.upper_env_slope)
                                : nlohmann::ordered_json(nullptr)},
        {"theory_exponent", report.theory_exponent},
        {"alpha", report.alpha},
        {"lambda", report.lambda},
    };
}

nlohmann::ordered_json to_json(const LambdaSweep& sweep) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : sweep.rows) {
        rows.push_back({{"lambda", row.lambda}, {"mean", row.mean}, {"se", row.se}});
    }
    nlohmann::ordered_json out{
        {"rows", rows},
        {"threshold_lambda", sweep.has_threshold
                                 ? nlohmann::ordered_json(sweep.threshold_lambda)
                                 : nlohmann::ordered_json(nullptr)},
    };
    out["epsilon_over_3"] = sweep.epsilon_over_3
                                ? nlohmann::ordered_json(*sweep.epsilon_over_3)
                                : nlohmann::ordered_json(nullptr);
    return out;
}

std::string growth_csv(const GrowthReport& report) {
    std::ostringstream out;
    out << "T,mean,se,analytic_lower,upper_env\n";
    for (const auto& h : report.horizons) {
        out << h.horizon << ',' << format_double(h.mean) << ',' << format_double(h.se) << ','
            << format_double(h.analytic_lower) << ',' << format_double(h.upper_env) << '\n';
    }
    return out.str();
}

std::string lambda_sweep_csv(const LambdaSweep& sweep) {
    std::ostringstream out;
    out << "lambda,mean,se\n";
    for (const auto& row : sweep.rows) {
        out << format_double(row.lambda) << ',' << format_double(row.mean) << ','
            << format_double(row.se) << '\n';
    }
    return out.str();
}

std::string ledger_csv(std::span<const double> prices, const LedgerReport& ledger,
                       const MarketParams& params) {
    std::ostringstream out;
    out << "t,price,phi,shares,running_cash\n";
    KahanSum cash;
    for (std::size_t t = 0; t < ledger.phi.size(); ++t) {
        cash.add(-ledger.phi[t] * prices[t]);
        cash.add(-params.lambda * std::pow(std::abs(ledger.phi[t]), params.alpha));
        out << t << ',' << format_double(prices[t]) << ',' << format_double(ledger.phi[t])
            << ',' << format_double(ledger.shares[t]) << ',' << format_double(cash.value())
            << '\n';
    }
    return out.str();
}

std::string variance_ratio_csv(const SecondOrderTable& table, double hurst) {
    std::ostringstream out;
    out << "t,var_s,var_over_t2h\n";
    for (std::uint64_t t = 1; t <= table.horizon();
         t = std::max(t + 1, static_cast<std::uint64_t>(1.05 * static_cast<double>(t)))) {
        const double v = table.var_s(t);
        out << t << ',' << format_double(v) << ','
            << format_double(v / std::pow(static_cast<double>(t), 2.0 * hurst)) << '\n';
    }
    return out.str();
}

std::string rho_grid_csv(const SecondOrderTable& table) {
    std::ostringstream out;
    out << "s,t,rho\n";
    const std::uint64_t horizon = table.horizon();
    for (std::uint64_t t = 1; t < horizon;
         t = std::max(t + 1, static_cast<std::uint64_t>(1.2 * static_cast<double>(t)))) {
        for (std::uint64_t s = t + 1; s <= horizon;
             s = std::max(s + 1, static_cast<std::uint64_t>(1.2 * static_cast<double>(s)))) {
            out << s << ',' << t << ',' << format_double(table.rho(s, t)) << '\n';
        }
    }
    return out.str();
}

namespace {

nlohmann::ordered_json model_json(const CovarianceModel& model) {
    if (model.kind() == CovarianceKind::Fgn) {
        return nlohmann::ordered_json{{"kind", "fgn"},
                                      {"hurst", model.hurst()},
                                      {"scale", model.variance_scale()}};
    }
    return nlohmann::ordered_json{{"kind", "explicit"},
                                  {"lags", model.explicit_values().size()},
                                  {"compact", model.compactly_supported()}};
}

}  // namespace

void write_path_batch(const PathBatch& batch, const CovarianceModel& model,
                      const std::filesystem::path& file) {
    nlohmann::ordered_json header{
        {"format", "negmem-paths-v1"},
        {"model", model_json(model)},
        {"T", batch.horizon},
        {"n_paths", batch.n_paths},
        {"seed", batch.master_seed},
        {"sampler", sampler_name(batch.sampler)},
        {"rng_algorithm", batch.rng_algorithm},
    };
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write batch file: " + file.string());
    out << header.dump() << '\n';
    out.write(reinterpret_cast<const char*>(batch.increments.data()),
              static_cast<std::streamsize>(batch.increments.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(batch.prices.data()),
              static_cast<std::streamsize>(batch.prices.size() * sizeof(double)));
}

PathBatch read_path_batch(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open batch file: " + file.string());
    std::string header_line;
    std::getline(in, header_line);
    const auto header = nlohmann::ordered_json::parse(header_line);
    if (header.value("format", "") != "negmem-paths-v1") {
        throw std::runtime_error("not a negmem path batch: " + file.string());
    }
    PathBatch batch;
    batch.horizon = header.at("T").get<std::uint64_t>();
    batch.n_paths = header.at("n_paths").get<std::uint64_t>();
    batch.master_seed = header.at("seed").get<std::uint64_t>();
    batch.sampler = sampler_from_name(header.at("sampler").get<std::string>());
    batch.rng_algorithm = header.at("rng_algorithm").get<std::string>();
    batch.increments.resize(batch.n_paths * batch.horizon);
    batch.prices.resize(batch.n_paths * (batch.horizon + 1));
    in.read(reinterpret_cast<char*>(batch.increments.data()),
            static_cast<std::streamsize>(batch.increments.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(batch.prices.data()),
            static_cast<std::streamsize>(batch.prices.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated batch file: " + file.string());
    return batch;
}

std::string path_batch_csv(const PathBatch& batch) {
    std::ostringstream out;
    out << "path,t,z,s\n";
    for (std::uint64_t i = 0; i < batch.n_paths; ++i) {
        const auto z = batch.z(i);
        const auto s = batch.s(i);
        out << i << ",0,," << format_double(s[0]) << '\n';
        for (std::uint64_t t = 1; t <= batch.horizon; ++t) {
            out << i << ',' << t << ',' << format_double(z[t - 1]) << ','
                << format_double(s[t]) << '\n';
        }
    }
    return out.str();
}

void write_text_file(const std::filesystem::path& file, const std::string& content) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + file.string());
    out << content;
}

}  // namespace negmem
