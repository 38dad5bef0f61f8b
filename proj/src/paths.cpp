#include "negmem/paths.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "negmem/rng.hpp"

namespace negmem {

const char* sampler_name(Sampler s) {
    switch (s) {
        case Sampler::CirculantEmbedding: return "circulant-embedding";
        case Sampler::DurbinLevinson: return "durbin-levinson";
        case Sampler::Cholesky: return "cholesky";
    }
    return "unknown";
}

Sampler sampler_from_name(const std::string& name) {
    if (name == "ce" || name == "circulant-embedding") return Sampler::CirculantEmbedding;
    if (name == "dl" || name == "durbin-levinson") return Sampler::DurbinLevinson;
    if (name == "cholesky" || name == "chol") return Sampler::Cholesky;
    throw std::invalid_argument("unknown sampler: " + name);
}

namespace {

// First row of the even circulant extension of {r(0..M/2)}.
std::vector<std::complex<double>> circulant_row(const CovarianceModel& model,
                                                std::size_t m) {
    std::vector<std::complex<double>> row(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t lag = std::min(k, m - k);
        row[k] = {model.at(static_cast<std::int64_t>(lag)), 0.0};
    }
    return row;
}

}  // namespace

SpectrumDiagnostic spectrum_check(const CovarianceModel& model, std::uint64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("spectrum_check: horizon must be positive");
    const std::size_t m = next_pow2(2 * static_cast<std::size_t>(horizon));
    FftPlan plan(m);
    auto row = circulant_row(model, m);
    plan.forward(row);

    SpectrumDiagnostic diag;
    diag.embedding_size = m;
    diag.min_eigenvalue = row[0].real();
    const double tol = PathGenerator::kEigenvalueTolerance * model.at(0);
    for (const auto& v : row) {
        const double eig = v.real();
        diag.min_eigenvalue = std::min(diag.min_eigenvalue, eig);
        if (eig < 0.0 && eig >= -tol) diag.clipped_mass += -eig;
    }
    return diag;
}

PathGenerator::PathGenerator(const CovarianceModel& model, std::uint64_t horizon,
                             Sampler sampler, bool allow_fallback)
    : model_(model), horizon_(horizon), sampler_(sampler) {
    if (horizon < 1) throw std::invalid_argument("PathGenerator: horizon must be positive");

    if (sampler_ == Sampler::CirculantEmbedding) {
        spectrum_ = spectrum_check(model, horizon);
        const double tol = kEigenvalueTolerance * model.at(0);
        if (spectrum_->min_eigenvalue < -tol) {
            if (!allow_fallback) {
                std::ostringstream msg;
                msg << "circulant embedding of size " << spectrum_->embedding_size
                    << " has min eigenvalue " << spectrum_->min_eigenvalue
                    << " below tolerance " << -tol << " and fallback is not permitted";
                throw SpectrumError(msg.str(), *spectrum_);
            }
            sampler_ = Sampler::DurbinLevinson;
        } else {
            const std::size_t m = spectrum_->embedding_size;
            plan_.emplace(m);
            auto row = circulant_row(model, m);
            plan_->forward(row);
            freq_scale_.resize(m);
            const double n = static_cast<double>(m);
            for (std::size_t k = 0; k < m; ++k) {
                const double eig = std::max(row[k].real(), 0.0);
                const double divisor = (k == 0 || k == m / 2) ? n : 2.0 * n;
                freq_scale_[k] = std::sqrt(eig / divisor);
            }
        }
    }

    if (sampler_ == Sampler::DurbinLevinson) {
        rvals_.resize(horizon);
        for (std::uint64_t k = 0; k < horizon; ++k) {
            rvals_[k] = model.at(static_cast<std::int64_t>(k));
        }
    }

    if (sampler_ == Sampler::Cholesky) {
        if (horizon > kCholeskyCap) {
            std::ostringstream msg;
            msg << "Cholesky sampler is capped at T <= " << kCholeskyCap
                << " (requested " << horizon << ")";
            throw std::invalid_argument(msg.str());
        }
        const std::size_t n = static_cast<std::size_t>(horizon);
        std::vector<double> rv(n);
        for (std::size_t k = 0; k < n; ++k) rv[k] = model.at(static_cast<std::int64_t>(k));
        chol_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double acc = rv[i - j];
                for (std::size_t p = 0; p < j; ++p) acc -= chol_[i * n + p] * chol_[j * n + p];
                if (i == j) {
                    if (!(acc > 0.0)) {
                        throw std::domain_error(
                            "Cholesky sampler: covariance matrix is not positive definite");
                    }
                    chol_[i * n + j] = std::sqrt(acc);
                } else {
                    chol_[i * n + j] = acc / chol_[j * n + j];
                }
            }
        }
    }
}

const char* PathGenerator::rng_algorithm() const { return GaussianStream::kAlgorithm; }

void PathGenerator::generate(std::uint64_t master_seed, std::uint64_t path_index,
                             std::span<double> z_out, std::span<double> s_out,
                             Workspace& ws) const {
    if (z_out.size() != horizon_ || s_out.size() != horizon_ + 1) {
        throw std::invalid_argument("PathGenerator::generate: output span size mismatch");
    }
    const std::uint64_t seed = derive_stream_seed(master_seed, path_index);
    switch (sampler_) {
        case Sampler::CirculantEmbedding: generate_circulant(seed, z_out, ws); break;
        case Sampler::DurbinLevinson: generate_durbin_levinson(seed, z_out, ws); break;
        case Sampler::Cholesky: generate_cholesky(seed, z_out, ws); break;
    }
    s_out[0] = 0.0;
    for (std::uint64_t t = 1; t <= horizon_; ++t) s_out[t] = s_out[t - 1] + z_out[t - 1];
}

void PathGenerator::generate_circulant(std::uint64_t seed, std::span<double> z_out,
                                       Workspace& ws) const {
    const std::size_t m = plan_->size();
    const std::size_t half = m / 2;
    ws.freq.resize(m);
    GaussianStream gauss(seed);

    ws.freq[0] = {freq_scale_[0] * gauss.next(), 0.0};
    for (std::size_t k = 1; k < half; ++k) {
        const double re = freq_scale_[k] * gauss.next();
        const double im = freq_scale_[k] * gauss.next();
        ws.freq[k] = {re, im};
        ws.freq[m - k] = {re, -im};
    }
    ws.freq[half] = {freq_scale_[half] * gauss.next(), 0.0};

    plan_->forward(ws.freq);
    for (std::uint64_t t = 0; t < horizon_; ++t) z_out[t] = ws.freq[t].real();
}

void PathGenerator::generate_durbin_levinson(std::uint64_t seed, std::span<double> z_out,
                                             Workspace& ws) const {
    const std::size_t n = static_cast<std::size_t>(horizon_);
    ws.a.assign(n, 0.0);  // phi_{t-1, .}
    ws.b.assign(n, 0.0);  // phi_{t, .}
    GaussianStream gauss(seed);

    double v = rvals_[0];
    z_out[0] = std::sqrt(v) * gauss.next();
    for (std::size_t t = 1; t < n; ++t) {
        double num = rvals_[t];
        for (std::size_t j = 1; j < t; ++j) num -= ws.a[j] * rvals_[t - j];
        const double kappa = num / v;
        for (std::size_t j = 1; j < t; ++j) ws.b[j] = ws.a[j] - kappa * ws.a[t - j];
        ws.b[t] = kappa;
        std::swap(ws.a, ws.b);
        v *= (1.0 - kappa * kappa);
        if (!(v > 0.0)) {
            throw std::domain_error(
                "Durbin-Levinson sampler: covariance sequence is not positive definite");
        }
        double mean = 0.0;
        for (std::size_t j = 1; j <= t; ++j) mean += ws.a[j] * z_out[t - j];
        z_out[t] = mean + std::sqrt(v) * gauss.next();
    }
}

void PathGenerator::generate_cholesky(std::uint64_t seed, std::span<double> z_out,
                                      Workspace& ws) const {
    const std::size_t n = static_cast<std::size_t>(horizon_);
    ws.c.resize(n);
    GaussianStream gauss(seed);
    for (std::size_t j = 0; j < n; ++j) ws.c[j] = gauss.next();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += chol_[i * n + j] * ws.c[j];
        z_out[i] = acc;
    }
}

void for_each_path(const PathGenerator& gen, std::uint64_t master_seed,
                   std::uint64_t n_paths, unsigned workers,
                   const std::function<void(std::uint64_t, std::span<const double>,
                                            std::span<const double>)>& fn) {
    unsigned n_workers = workers ? workers : std::thread::hardware_concurrency();
    if (n_workers == 0) n_workers = 1;
    n_workers = static_cast<unsigned>(
        std::min<std::uint64_t>(n_workers, std::max<std::uint64_t>(n_paths, 1)));

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;

    auto run = [&]() {
        PathGenerator::Workspace ws;
        std::vector<double> z(gen.horizon());
        std::vector<double> s(gen.horizon() + 1);
        try {
            for (;;) {
                const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n_paths) break;
                gen.generate(master_seed, i, z, s, ws);
                fn(i, z, s);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
            next.store(n_paths, std::memory_order_relaxed);
        }
    };

    if (n_workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
}

PathBatch sample_paths(const CovarianceModel& model, std::uint64_t horizon,
                       std::uint64_t n_paths, std::uint64_t master_seed,
                       const SampleOptions& options) {
    if (n_paths < 1) throw std::invalid_argument("sample_paths: n_paths must be positive");
    PathGenerator gen(model, horizon, options.sampler, options.allow_fallback);

    PathBatch batch;
    batch.horizon = horizon;
    batch.n_paths = n_paths;
    batch.master_seed = master_seed;
    batch.sampler = gen.sampler();
    batch.rng_algorithm = gen.rng_algorithm();
    batch.increments.resize(n_paths * horizon);
    batch.prices.resize(n_paths * (horizon + 1));

    for_each_path(gen, master_seed, n_paths, options.workers,
                  [&](std::uint64_t i, std::span<const double> z, std::span<const double> s) {
                      std::copy(z.begin(), z.end(), batch.increments.begin() + i * horizon);
                      std::copy(s.begin(), s.end(), batch.prices.begin() + i * (horizon + 1));
                  });
    return batch;
}

}  // namespace negmem
