#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "negmem/covariance.hpp"
#include "negmem/fft.hpp"

namespace negmem {

enum class Sampler { CirculantEmbedding, DurbinLevinson, Cholesky };

const char* sampler_name(Sampler s);
Sampler sampler_from_name(const std::string& name);

struct SpectrumDiagnostic {
    std::size_t embedding_size = 0;
    double min_eigenvalue = 0.0;
    double clipped_mass = 0.0;  // |mass| of eigenvalues clipped to zero
};

class SpectrumError : public std::runtime_error {
public:
    SpectrumError(const std::string& what, SpectrumDiagnostic diag)
        : std::runtime_error(what), diagnostic(diag) {}
    SpectrumDiagnostic diagnostic;
};

// Minimum eigenvalue of the circulant extension of {r(0), ..., r(M/2)} with
// M = next_pow2(2T), computed via FFT. Negative eigenvalues are reported,
// not thrown.
SpectrumDiagnostic spectrum_check(const CovarianceModel& model, std::uint64_t horizon);

struct SampleOptions {
    Sampler sampler = Sampler::CirculantEmbedding;
    // Permit falling back to Durbin-Levinson when the circulant spectrum has
    // eigenvalues below tolerance.
    bool allow_fallback = false;
    unsigned workers = 0;  // 0 = hardware concurrency
};

struct PathBatch {
    std::uint64_t horizon = 0;
    std::uint64_t n_paths = 0;
    std::uint64_t master_seed = 0;
    Sampler sampler = Sampler::CirculantEmbedding;
    std::string rng_algorithm;
    std::vector<double> increments;  // n_paths x T, row-major
    std::vector<double> prices;      // n_paths x (T+1), row-major, S_0 = 0

    std::span<const double> z(std::uint64_t path) const {
        return {increments.data() + path * horizon, horizon};
    }
    std::span<const double> s(std::uint64_t path) const {
        return {prices.data() + path * (horizon + 1), horizon + 1};
    }
};

// Immutable sampling plan for one (model, horizon, sampler) triple. Each
// path is a pure function of (master_seed, path_index): workers can draw
// paths in any order and batches come out identical.
class PathGenerator {
public:
    static constexpr double kEigenvalueTolerance = 1e-8;  // times r(0)
    static constexpr std::uint64_t kCholeskyCap = 2048;

    PathGenerator(const CovarianceModel& model, std::uint64_t horizon, Sampler sampler,
                  bool allow_fallback = false);

    std::uint64_t horizon() const { return horizon_; }
    Sampler sampler() const { return sampler_; }  // effective, after fallback
    const std::optional<SpectrumDiagnostic>& spectrum() const { return spectrum_; }
    const char* rng_algorithm() const;

    struct Workspace {
        std::vector<std::complex<double>> freq;
        std::vector<double> a;
        std::vector<double> b;
        std::vector<double> c;
    };

    // z_out: T increments; s_out: T+1 prices with s_out[0] = 0 and
    // s_out[t] = s_out[t-1] + z_out[t-1] in that exact summation order.
    void generate(std::uint64_t master_seed, std::uint64_t path_index,
                  std::span<double> z_out, std::span<double> s_out, Workspace& ws) const;

private:
    void generate_circulant(std::uint64_t seed, std::span<double> z_out, Workspace& ws) const;
    void generate_durbin_levinson(std::uint64_t seed, std::span<double> z_out,
                                  Workspace& ws) const;
    void generate_cholesky(std::uint64_t seed, std::span<double> z_out, Workspace& ws) const;

    CovarianceModel model_;
    std::uint64_t horizon_;
    Sampler sampler_;
    std::optional<SpectrumDiagnostic> spectrum_;
    std::optional<FftPlan> plan_;
    std::vector<double> freq_scale_;  // sqrt of spectrum with DH normalization
    std::vector<double> rvals_;       // r(0..T-1) for DL
    std::vector<double> chol_;        // T x T lower triangle, row-major
};

// Runs fn(path_index, z, s) for every path on `workers` threads. The spans
// point into thread-local scratch; copy anything that must outlive the call.
// fn must be safe to call concurrently for distinct path indices.
void for_each_path(const PathGenerator& gen, std::uint64_t master_seed,
                   std::uint64_t n_paths, unsigned workers,
                   const std::function<void(std::uint64_t, std::span<const double>,
                                            std::span<const double>)>& fn);

// Materialized batch with exact per-path reproducibility.
PathBatch sample_paths(const CovarianceModel& model, std::uint64_t horizon,
                       std::uint64_t n_paths, std::uint64_t master_seed,
                       const SampleOptions& options = {});

}  // namespace negmem
