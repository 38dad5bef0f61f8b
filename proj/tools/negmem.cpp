// negmem command line: model verification, bound certification, exact path
// sampling, ledger settlement, and the growth/lambda experiments. Every run
// derives from one master seed and writes a manifest that reproduces it
// byte-for-byte via --config.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "negmem/covariance.hpp"
#include "negmem/market.hpp"
#include "negmem/moments.hpp"
#include "negmem/montecarlo.hpp"
#include "negmem/paths.hpp"
#include "negmem/serialize.hpp"
#include "negmem/strategies.hpp"
#include "negmem/util.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAssumption = 2;
constexpr int kExitRuntime = 3;

struct ModelOptions {
    std::string kind = "fgn";
    double hurst = 0.25;
    double scale = 1.0;
    std::string cov_file;
    bool compact = false;

    void attach(CLI::App& app) {
        app.add_option("--model", kind, "Covariance model: fgn or explicit")
            ->check(CLI::IsMember({"fgn", "explicit"}));
        app.add_option("--hurst", hurst, "Hurst parameter in (0, 1/2) for fgn");
        app.add_option("--scale", scale, "Variance scale r(0)");
        app.add_option("--cov-file", cov_file,
                       "One-column covariance file for explicit models");
        app.add_flag("--compact", compact,
                     "Treat the explicit sequence as zero beyond its last lag");
    }

    negmem::CovarianceModel build() const {
        if (kind == "fgn") return negmem::CovarianceModel::fgn(hurst, scale);
        if (cov_file.empty()) {
            throw std::invalid_argument("explicit model needs --cov-file");
        }
        return negmem::load_covariance_file(cov_file, compact);
    }
};

struct OutputOptions {
    std::string dir = "out";

    void attach(CLI::App& app) {
        app.add_option("--out", dir, "Output directory")->envname("NEGMEM_OUT");
    }

    fs::path prepare() const {
        fs::path p(dir);
        fs::create_directories(p);
        return p;
    }
};

void write_manifest(const CLI::App& app, const std::string& command, const fs::path& dir) {
    std::ofstream out(dir / "manifest.cfg", std::ios::binary);
    out << "# negmem manifest; rerun with: negmem " << command
        << " --config <this file>\n";
    out << "# command=" << command << "\n";
    out << app.config_to_str(true, false);
}

std::vector<double> load_column(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        double v;
        if (row >> v) values.push_back(v);
    }
    return values;
}

void configure_app(CLI::App& app) {
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "Flat key=value config file; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::ignore);
}

int parse_or_exit(CLI::App& app, int argc, char** argv, int& code) {
    try {
        app.parse(argc, argv);
        return -1;
    } catch (const CLI::CallForHelp& e) {
        code = app.exit(e);
        return code;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        code = kExitConfig;
        return code;
    }
}

int cmd_verify(int argc, char** argv) {
    CLI::App app{"Certify the negative-memory covariance conditions", "negmem verify"};
    configure_app(app);
    ModelOptions model;
    OutputOptions output;
    std::uint64_t lag_lo = 10, lag_hi = 100000;
    model.attach(app);
    output.attach(app);
    app.add_option("--lag-lo", lag_lo, "Smallest tail lag");
    app.add_option("--lag-hi", lag_hi, "Largest tail lag (>= 100 * lag-lo)");

    int code = 0;
    if (parse_or_exit(app, argc, argv, code) >= 0) return code;

    const auto m = model.build();
    const auto report = negmem::verify_assumption(m, lag_lo, lag_hi);
    const auto dir = output.prepare();
    negmem::write_text_file(dir / "assumption.json", negmem::to_json(report).dump(2) + "\n");
    write_manifest(app, "verify", dir);

    std::cout << (report.pass ? "PASS" : "FAIL") << " chi_fit=" << report.chi_fit
              << " j1=" << report.j1 << " j2=" << report.j2 << " t0=" << report.t0
              << "\n";
    if (!report.pass) {
        std::cout << "diagnostic: " << report.diagnostic << "\n";
        return kExitAssumption;
    }
    return kExitOk;
}

int cmd_certify(int argc, char** argv) {
    CLI::App app{"Search witnesses for the variance/covariance/rho bounds", "negmem certify"};
    configure_app(app);
    ModelOptions model;
    OutputOptions output;
    std::uint64_t horizon = 10000;
    model.attach(app);
    output.attach(app);
    app.add_option("--horizon", horizon, "Grid horizon (>= 1000)");

    int code = 0;
    if (parse_or_exit(app, argc, argv, code) >= 0) return code;

    const auto m = model.build();
    const auto cert = negmem::certify_bounds(m, horizon);
    const auto dir = output.prepare();
    negmem::write_text_file(dir / "certificate.json", negmem::to_json(cert).dump(2) + "\n");
    negmem::SecondOrderTable table(m, horizon);
    negmem::write_text_file(dir / "var_ratio.csv",
                            negmem::variance_ratio_csv(table, cert.hurst));
    negmem::write_text_file(dir / "rho_grid.csv", negmem::rho_grid_csv(table));
    write_manifest(app, "certify", dir);

    std::cout << "PASS b1=" << cert.b1 << " b2=" << cert.b2 << " k=" << cert.k
              << " epsilon=" << cert.epsilon << " r=" << cert.r << "\n";
    return kExitOk;
}

int cmd_sample(int argc, char** argv) {
    CLI::App app{"Draw exact Gaussian increment/price paths", "negmem sample"};
    configure_app(app);
    ModelOptions model;
    OutputOptions output;
    std::uint64_t horizon = 256, n_paths = 100, seed = 1;
    std::string sampler = "ce";
    bool allow_fallback = false, csv = false;
    unsigned workers = 0;
    model.attach(app);
    output.attach(app);
    app.add_option("-T,--horizon", horizon, "Steps per path");
    app.add_option("-n,--paths", n_paths, "Number of paths");
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--sampler", sampler, "ce, dl, or cholesky")
        ->check(CLI::IsMember({"ce", "dl", "cholesky"}));
    app.add_flag("--allow-fallback", allow_fallback,
                 "Fall back to Durbin-Levinson on embedding failure");
    app.add_option("--workers", workers, "Worker threads (0 = auto)");
    app.add_flag("--csv", csv, "Also write a per-(path,t) CSV");

    int code = 0;
    if (parse_or_exit(app, argc, argv, code) >= 0) return code;

    const auto m = model.build();
    negmem::SampleOptions opt;
    opt.sampler = negmem::sampler_from_name(sampler);
    opt.allow_fallback = allow_fallback;
    opt.workers = workers;
    const auto batch = negmem::sample_paths(m, horizon, n_paths, seed, opt);
    const auto dir = output.prepare();
    negmem::write_path_batch(batch, m, dir / "paths.bin");
    if (csv || n_paths * horizon <= 65536) {
        negmem::write_text_file(dir / "paths.csv", negmem::path_batch_csv(batch));
    }
    if (opt.sampler == negmem::Sampler::CirculantEmbedding) {
        negmem::write_text_file(
            dir / "spectrum.json",
            negmem::to_json(negmem::spectrum_check(m, horizon)).dump(2) + "\n");
    }
    write_manifest(app, "sample", dir);
    std::cout << "wrote " << batch.n_paths << " paths of length " << batch.horizon
              << " via " << negmem::sampler_name(batch.sampler) << " ("
              << batch.rng_algorithm << ")\n";
    return kExitOk;
}

int cmd_settle(int argc, char** argv) {
    CLI::App app{"Run the friction ledger over a price/speed pair", "negmem settle"};
    configure_app(app);
    OutputOptions output;
    std::string prices_file, phi_file;
    double alpha = 2.0, lambda = 0.01;
    output.attach(app);
    app.add_option("--prices", prices_file, "One-column price file S_0..S_T")->required();
    app.add_option("--phi", phi_file, "One-column trade-speed file phi_0..phi_T")
        ->required();
    app.add_option("--alpha", alpha, "Impact exponent (> 1)");
    app.add_option("--lambda", lambda, "Impact scale (> 0)");

    int code = 0;
    if (parse_or_exit(app, argc, argv, code) >= 0) return code;

    const auto prices = load_column(prices_file);
    const auto phi = load_column(phi_file);
    const negmem::MarketParams params{alpha, lambda};
    const auto ledger = negmem::settle(prices, phi, params);
    const auto dir = output.prepare();
    negmem::write_text_file(dir / "ledger.csv",
                            negmem::ledger_csv(prices, ledger, params));
    ordered_json summary{
        {"gross_pnl", ledger.gross_pnl},
        {"friction", ledger.friction},
        {"terminal_cash", ledger.terminal_cash},
        {"gstar_bound", ledger.gstar_bound},
    };
    negmem::write_text_file(dir / "ledger.json", summary.dump(2) + "\n");
    write_manifest(app, "settle", dir);
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

struct ExperimentOptions {
    double alpha = 2.0, lambda = 0.01;
    std::string strategy = "contrarian";
    std::uint64_t strategy_seed = 0;
    std::uint64_t n_paths = 10000, seed = 1;
    std::string sampler = "ce";
    bool allow_fallback = false;
    unsigned workers = 0;

    void attach(CLI::App& app) {
        app.add_option("--alpha", alpha, "Impact exponent (> 1)");
        app.add_option("--lambda", lambda, "Impact scale (> 0)");
        app.add_option("--strategy", strategy, "contrarian, zero, hold, or random")
            ->check(CLI::IsMember({"contrarian", "zero", "hold", "random"}));
        app.add_option("--strategy-seed", strategy_seed, "Seed for the random baseline");
        app.add_option("-n,--paths", n_paths, "Paths per horizon");
        app.add_option("--seed", seed, "Master seed");
        app.add_option("--sampler", sampler, "ce, dl, or cholesky")
            ->check(CLI::IsMember({"ce", "dl", "cholesky"}));
        app.add_flag("--allow-fallback", allow_fallback,
                     "Fall back to Durbin-Levinson on embedding failure");
        app.add_option("--workers", workers, "Worker threads (0 = auto)");
    }

    negmem::Strategy build_strategy() const {
        return negmem::Strategy{negmem::strategy_from_name(strategy), alpha, strategy_seed};
    }

    negmem::SampleOptions build_sample_options() const {
        negmem::SampleOptions opt;
        opt.sampler = negmem::sampler_from_name(sampler);
        opt.allow_fallback = allow_fallback;
        opt.workers = workers;
        return opt;
    }
};

int cmd_growth(int argc, char** argv) {
    CLI::App app{"Estimate E[X_T] across horizons and fit the growth exponent", "negmem growth"};
    configure_app(app);
    ModelOptions model;
    OutputOptions output;
    ExperimentOptions exp;
    std::vector<std::uint64_t> horizons{300, 600, 1200, 2400, 4800, 9600};
    bool bootstrap = false;
    model.attach(app);
    output.attach(app);
    exp.attach(app);
    app.add_option("--horizons", horizons, "Comma-separated horizons")->delimiter(',');
    app.add_flag("--bootstrap", bootstrap, "Bootstrap the slope interval");

    int code = 0;
    if (parse_or_exit(app, argc, argv, code) >= 0) return code;

    const auto m = model.build();
    const negmem::MarketParams params{exp.alpha, exp.lambda};
    negmem::GrowthOptions opt;
    opt.sample = exp.build_sample_options();
    opt.bootstrap_ci = bootstrap;
    const auto report = negmem::fit_growth_exponent(m, exp.build_strategy(), params,
                                                    horizons, exp.n_paths, exp.seed, opt);
    const auto dir = output.prepare();
    negmem::write_text_file(dir / "growth.json", negmem::to_json(report).dump(2) + "\n");
    negmem::write_text_file(dir / "growth.csv", negmem::growth_csv(report));
    if (exp.strategy == "contrarian") {
        ordered_json terms = ordered_json::array();
        negmem::SecondOrderTable table(m, horizons.back());
        for (std::uint64_t t : horizons) {
            if (t % 6 != 0) continue;
            auto row = negmem::to_json(
                negmem::analytic_profit_terms(table, t, exp.alpha, exp.lambda));
            row["horizon"] = t;
            terms.push_back(row);
        }
        negmem::write_text_file(dir / "profit_terms.json", terms.dump(2) + "\n");
    }
    write_manifest(app, "growth", dir);

    if (report.fit_valid) {
        std::cout << "slope=" << report.fitted_slope << " ci=[" << report.slope_ci_lo
                  << "," << report.slope_ci_hi << "] theory=" << report.theory_exponent
                  << "\n";
    } else {
        std::cout << "no growth fit (insufficient positive horizons); theory="
                  << report.theory_exponent << "\n";
    }
    for (std::uint64_t t : report.nonpositive_horizons) {
        std::cout << "nonpositive mean at T=" << t << "\n";
    }
    return kExitOk;
}

int cmd_lambda_sweep(int argc, char** argv) {
    CLI::App app{"Locate the friction level where the mean profit flips sign", "negmem lambda-sweep"};
    configure_app(app);
    ModelOptions model;
    OutputOptions output;
    ExperimentOptions exp;
    std::uint64_t horizon = 600;
    std::vector<double> lambdas{0.001, 0.01, 0.1, 1.0};
    std::string certificate_file;
    model.attach(app);
    output.attach(app);
    exp.attach(app);
    app.add_option("-T,--horizon", horizon, "Horizon");
    app.add_option("--lambdas", lambdas, "Ascending impact scales")->delimiter(',');
    app.add_option("--certificate", certificate_file,
                   "certificate.json to report epsilon/3 alongside");

    int code = 0;
    if (parse_or_exit(app, argc, argv, code) >= 0) return code;

    const auto m = model.build();
    negmem::BoundsCertificate cert;
    bool has_cert = false;
    if (!certificate_file.empty()) {
        std::ifstream in(certificate_file);
        if (!in) throw std::runtime_error("cannot open " + certificate_file);
        const auto j = ordered_json::parse(in);
        cert.epsilon = j.at("epsilon").get<double>();
        has_cert = true;
    }
    const auto sweep = negmem::lambda_sweep(m, exp.build_strategy(), exp.alpha, horizon,
                                            lambdas, exp.n_paths, exp.seed,
                                            exp.build_sample_options(),
                                            has_cert ? &cert : nullptr);
    const auto dir = output.prepare();
    negmem::write_text_file(dir / "sweep.json", negmem::to_json(sweep).dump(2) + "\n");
    negmem::write_text_file(dir / "sweep.csv", negmem::lambda_sweep_csv(sweep));
    write_manifest(app, "lambda-sweep", dir);

    std::cout << "threshold_lambda="
              << (sweep.has_threshold ? negmem::format_double(sweep.threshold_lambda)
                                      : std::string("none"));
    if (sweep.epsilon_over_3) {
        std::cout << " epsilon/3=" << negmem::format_double(*sweep.epsilon_over_3);
    }
    std::cout << "\n";
    return kExitOk;
}

void usage() {
    std::cout << "negmem <command> [options]\n"
                 "commands:\n"
                 "  verify        check the negative-memory covariance conditions\n"
                 "  certify       grid-search witnesses for the moment bounds\n"
                 "  sample        draw exact Gaussian paths\n"
                 "  settle        run the friction ledger on given prices/speeds\n"
                 "  growth        estimate E[X_T] across horizons, fit the exponent\n"
                 "  lambda-sweep  find the profitable friction range\n"
                 "run 'negmem <command> --help' for options\n";
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        usage();
        return kExitConfig;
    }
    const std::string command = argv[1];
    try {
        if (command == "verify") return cmd_verify(argc - 1, argv + 1);
        if (command == "certify") return cmd_certify(argc - 1, argv + 1);
        if (command == "sample") return cmd_sample(argc - 1, argv + 1);
        if (command == "settle") return cmd_settle(argc - 1, argv + 1);
        if (command == "growth") return cmd_growth(argc - 1, argv + 1);
        if (command == "lambda-sweep") return cmd_lambda_sweep(argc - 1, argv + 1);
        if (command == "--help" || command == "-h" || command == "help") {
            usage();
            return kExitOk;
        }
        std::cerr << "unknown command: " << command << "\n";
        usage();
        return kExitConfig;
    } catch (const negmem::CertificationError& e) {
        std::cerr << "certification failed: " << e.what() << "\n";
        return kExitAssumption;
    } catch (const negmem::SpectrumError& e) {
        std::cerr << "spectrum check failed: " << e.what() << "\n";
        return kExitAssumption;
    } catch (const std::domain_error& e) {
        std::cerr << "model violates a positivity condition: " << e.what() << "\n";
        return kExitAssumption;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
